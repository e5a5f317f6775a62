#include "evminer/stemmer.hpp"

#include <array>
#include <utility>

namespace evminer {

namespace {

class PorterStemmer {
public:
    explicit PorterStemmer(std::string word) : b_(std::move(word)) {}

    std::string run() {
        if (b_.size() <= 2) return b_;
        k_ = static_cast<int>(b_.size()) - 1;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
        return b_;
    }

private:
    std::string b_;
    int k_ = 0;  // end of the current stem (inclusive)
    int j_ = 0;  // end of the stem before a matched suffix

    bool cons(int i) const {
        switch (b_[static_cast<std::size_t>(i)]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !cons(i - 1);
            default: return true;
        }
    }

    // Number of VC sequences in b[0..j].
    int measure() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i) {
            if (!cons(i)) return true;
        }
        return false;
    }

    bool double_cons(int j) const {
        if (j < 1) return false;
        if (b_[static_cast<std::size_t>(j)] != b_[static_cast<std::size_t>(j - 1)]) return false;
        return cons(j);
    }

    // cvc where the last c is not w, x or y.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b_[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        const int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (b_.compare(static_cast<std::size_t>(k_ - len + 1), s.size(), s) != 0) return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_measured(std::string_view s) {
        if (measure() > 0) set_to(s);
    }

    void step1ab() {
        if (b_[static_cast<std::size_t>(k_)] == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (b_[static_cast<std::size_t>(k_ - 1)] != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (measure() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_cons(k_)) {
                --k_;
                char ch = b_[static_cast<std::size_t>(k_)];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else {
                j_ = k_;
                if (measure() == 1 && cvc(k_)) set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    void step2() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 20> rules{{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},    {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},  {"biliti", "ble"},
        }};
        for (const auto& [suffix, repl] : rules) {
            if (ends(suffix)) {
                replace_if_measured(repl);
                return;
            }
        }
    }

    void step3() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> rules{{
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        }};
        for (const auto& [suffix, repl] : rules) {
            if (ends(suffix)) {
                replace_if_measured(repl);
                return;
            }
        }
    }

    void step4() {
        static constexpr std::array<std::string_view, 19> suffixes{
            "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
            "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
        for (auto suffix : suffixes) {
            if (!ends(suffix)) continue;
            if (suffix == "ion") {
                if (j_ < 0) return;
                char ch = b_[static_cast<std::size_t>(j_)];
                if (ch != 's' && ch != 't') return;
            }
            if (measure() > 1) k_ = j_;
            return;
        }
    }

    void step5() {
        j_ = k_;
        if (b_[static_cast<std::size_t>(k_)] == 'e') {
            int a = measure();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (b_[static_cast<std::size_t>(k_)] == 'l' && double_cons(k_) && measure() > 1) --k_;
    }
};

}  // namespace

std::string porter_stem(std::string_view word) {
    for (char c : word) {
        if (c < 'a' || c > 'z') return std::string(word);
    }
    return PorterStemmer(std::string(word)).run();
}

}  // namespace evminer
