#include "mmrec/text.hpp"

#include <algorithm>
#include <array>

namespace mmrec {

namespace {

// Sorted for binary search.
constexpr std::array<std::string_view, 174> kStopWords = {
    "about", "above", "after", "again", "against", "all", "am", "an", "and",
    "any", "are", "aren", "as", "at", "be", "because", "been", "before",
    "being", "below", "between", "both", "but", "by", "can", "cannot",
    "could", "couldn", "did", "didn", "do", "does", "doesn", "doing", "don",
    "down", "during", "each", "few", "for", "from", "further", "had",
    "hadn", "has", "hasn", "have", "haven", "having", "he", "her", "here",
    "hers", "herself", "him", "himself", "his", "how", "if", "in", "into",
    "is", "isn", "it", "its", "itself", "just", "let", "ll", "me", "more",
    "most", "mustn", "my", "myself", "no", "nor", "not", "now", "of", "off",
    "on", "once", "only", "or", "other", "ought", "our", "ours",
    "ourselves", "out", "over", "own", "re", "same", "shan", "she",
    "should", "shouldn", "so", "some", "such", "than", "that", "the",
    "their", "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "through", "to", "too", "under", "until",
    "up", "us", "ve", "very", "was", "wasn", "we", "were", "weren", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will",
    "with", "won", "would", "wouldn", "you", "your", "yours", "yourself",
    "yourselves", "also", "may", "might", "must", "shall", "upon", "via",
    "within", "without", "yet", "however", "thus", "therefore", "etc",
    "et", "al", "among", "amongst", "whether", "either", "neither",
    "another", "every", "much", "many", "several", "per",
};

bool is_token_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c >= 0x80;
}

const std::array<std::string_view, kStopWords.size()>& sorted_stop_words() {
    static const auto sorted = [] {
        auto copy = kStopWords;
        std::sort(copy.begin(), copy.end());
        return copy;
    }();
    return sorted;
}

}  // namespace

std::size_t utf8_length(std::string_view text) {
    return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

bool is_stopword(std::string_view token) {
    const auto& words = sorted_stop_words();
    return std::binary_search(words.begin(), words.end(), token);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (utf8_length(current) >= 2) tokens.push_back(current);
        current.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (!is_token_byte(c)) {
            flush();
            continue;
        }
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        current.push_back(static_cast<char>(c));
    }
    flush();
    return tokens;
}

std::vector<std::string> tokenize(std::string_view text, bool remove_stopwords) {
    auto tokens = tokenize(text);
    if (remove_stopwords)
        std::erase_if(tokens, [](const std::string& t) { return is_stopword(t); });
    return tokens;
}

}  // namespace mmrec
