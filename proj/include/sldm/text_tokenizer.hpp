#ifndef SLDM_TEXT_TOKENIZER_HPP
#define SLDM_TEXT_TOKENIZER_HPP

#include <string>
#include <vector>

namespace sldm {

// Closed-vocabulary word tokenizer for garment descriptions. Token 0 is
// padding, token 1 is the unknown-word fallback; real words start at 2.
class TextTokenizer {
  public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kMaxTokens = 64;

    TextTokenizer();

    int vocab_size() const;
    int token_id(const std::string& word) const;  // kUnk if not in vocabulary
    std::vector<int> encode(const std::string& text) const;  // padded to kMaxTokens
    std::string word(int id) const;

  private:
    std::vector<std::string> vocab_;
};

std::vector<std::string> split_words(const std::string& text);

}  // namespace sldm

#endif
