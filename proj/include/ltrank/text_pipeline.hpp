#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ltrank {

/// Set of words removed from token streams. Entries are stored lowercase.
class StopList {
  public:
    StopList() = default;
    StopList(std::initializer_list<std::string> words);

    /// Reads one word per line; '#' starts a comment line, blank lines are
    /// ignored. Words are lowercased on load.
    static StopList from_file(const std::string& path);

    void insert(std::string_view word);
    bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
    std::size_t size() const { return words_.size(); }

  private:
    std::unordered_set<std::string> words_;
};

/// Splits raw text into lowercase tokens. Every character that is not an
/// ASCII letter or digit acts as a separator; empty fragments are dropped.
std::vector<std::string> tokenize(std::string_view raw);

/// Drops tokens that are stop words, contain more than 4 digit characters
/// in total, or contain a run of 4 or more identical characters.
std::vector<std::string> filter_tokens(std::vector<std::string> tokens, const StopList& stoplist);

/// tokenize followed by filter_tokens. Applied identically to documents and
/// queries; no stemming.
std::vector<std::string> preprocess(std::string_view raw, const StopList& stoplist);

}  // namespace ltrank
