#include "sldm/text_tokenizer.hpp"

#include <algorithm>
#include <cctype>

namespace sldm {

TextTokenizer::TextTokenizer() {
    vocab_ = {
        "<pad>", "<unk>",
        "upper", "lower", "garment", "shirt", "dress", "skirt", "pants",
        "sleeve", "sleeveless", "strapless", "neckline", "collar", "waistband",
        "right", "left", "with", "none",
        "short", "long", "elbow", "three", "quarter", "length",
        "knee", "above", "below", "midi", "mini", "mid", "calf",
        "high", "ankle", "full", "narrow", "normal", "wide",
        "shallow", "deep",
    };
}

int TextTokenizer::vocab_size() const { return static_cast<int>(vocab_.size()); }

int TextTokenizer::token_id(const std::string& word) const {
    auto it = std::find(vocab_.begin(), vocab_.end(), word);
    if (it == vocab_.end()) return kUnk;
    return static_cast<int>(it - vocab_.begin());
}

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalpha(u)) {
            cur.push_back(static_cast<char>(std::tolower(u)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<int> TextTokenizer::encode(const std::string& text) const {
    std::vector<int> ids;
    for (const auto& w : split_words(text)) {
        if (static_cast<int>(ids.size()) >= kMaxTokens) break;
        ids.push_back(token_id(w));
    }
    ids.resize(kMaxTokens, kPad);
    return ids;
}

std::string TextTokenizer::word(int id) const {
    if (id < 0 || id >= vocab_size()) return "<unk>";
    return vocab_[static_cast<size_t>(id)];
}

}  // namespace sldm
