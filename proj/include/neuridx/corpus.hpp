#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace neuridx {

using KeywordId = std::uint32_t;
using FileId = std::uint32_t;

/// Lowercased tokens of one file; a token's position is its index.
struct TokenSeq {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

/// Dense bijection keyword <-> id. Ids are assigned in first-seen order
/// over the corpus file list (files sorted by path), so the mapping is a
/// pure function of the corpus contents.
class Dictionary {
 public:
  KeywordId add(const std::string& word);
  std::optional<KeywordId> id_of(std::string_view word) const;
  const std::string& word(KeywordId id) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, KeywordId> ids_;
};

struct CorpusFile {
  FileId id = 0;
  std::string path;
  TokenSeq tokens;
};

struct Corpus {
  std::vector<CorpusFile> files;
  Dictionary dictionary;
};

/// Lowercases and splits on everything that is not a letter or digit.
/// Stopwords are removed and the survivors keep compacted 0-based positions.
TokenSeq tokenize(std::string_view text, const std::set<std::string>& stopwords);

Dictionary build_dictionary(std::span<const TokenSeq> seqs);

/// Recursively loads every regular file under root, sorted by path.
/// Throws missing_root / empty_corpus / decode_error (invalid UTF-8).
Corpus load_corpus(const std::filesystem::path& root,
                   const std::set<std::string>& stopwords);

/// Newline-delimited stopword file, one word per line.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

const std::set<std::string>& default_stopwords();

}  // namespace neuridx
