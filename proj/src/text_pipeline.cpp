#include "ltrank/text_pipeline.hpp"

#include <fstream>

#include "ltrank/errors.hpp"

namespace ltrank {

namespace {

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

inline bool is_ascii_alnum(char c) {
    return is_ascii_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline char to_lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lowercase(std::string_view word) {
    std::string out(word);
    for (char& c : out) c = to_lower_ascii(c);
    return out;
}

}  // namespace

StopList::StopList(std::initializer_list<std::string> words) {
    for (const auto& w : words) insert(w);
}

void StopList::insert(std::string_view word) {
    if (word.empty()) return;
    words_.insert(lowercase(word));
}

StopList StopList::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open stop list file: " + path);
    StopList list;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        if (line[begin] == '#') continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        list.insert(std::string_view(line).substr(begin, end - begin + 1));
    }
    return list;
}

std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : raw) {
        if (is_ascii_alnum(c)) {
            current.push_back(to_lower_ascii(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> filter_tokens(std::vector<std::string> tokens, const StopList& stoplist) {
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (auto& token : tokens) {
        if (stoplist.contains(token)) continue;

        // More than 4 digit characters anywhere in the token deletes it.
        int digits = 0;
        for (char c : token) digits += is_ascii_digit(c) ? 1 : 0;
        if (digits > 4) continue;

        // A run of 4 or more identical characters deletes it.
        int run = 1;
        bool long_run = false;
        for (std::size_t i = 1; i < token.size(); ++i) {
            run = (token[i] == token[i - 1]) ? run + 1 : 1;
            if (run > 3) {
                long_run = true;
                break;
            }
        }
        if (long_run) continue;

        kept.push_back(std::move(token));
    }
    return kept;
}

std::vector<std::string> preprocess(std::string_view raw, const StopList& stoplist) {
    return filter_tokens(tokenize(raw), stoplist);
}

}  // namespace ltrank
