#include "neuridx/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "neuridx/error.hpp"

namespace neuridx {

KeywordId Dictionary::add(const std::string& word) {
  auto it = ids_.find(word);
  if (it != ids_.end()) return it->second;
  KeywordId id = static_cast<KeywordId>(words_.size());
  words_.push_back(word);
  ids_.emplace(word, id);
  return id;
}

std::optional<KeywordId> Dictionary::id_of(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Dictionary::word(KeywordId id) const {
  return words_.at(id);
}

namespace {

// ASCII letters/digits start or extend a token; bytes >= 0x80 are treated
// as word constituents so multibyte UTF-8 sequences stay intact.
bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

bool valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t extra;
    if (c < 0x80) extra = 0;
    else if ((c & 0xe0) == 0xc0 && c >= 0xc2) extra = 1;
    else if ((c & 0xf0) == 0xe0) extra = 2;
    else if ((c & 0xf8) == 0xf0 && c <= 0xf4) extra = 3;
    else return false;
    if (extra > 0 && i + extra >= text.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k)
      if ((static_cast<unsigned char>(text[i + k]) & 0xc0) != 0x80) return false;
    i += extra + 1;
  }
  return true;
}

}  // namespace

TokenSeq tokenize(std::string_view text, const std::set<std::string>& stopwords) {
  TokenSeq seq;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      if (!stopwords.contains(current)) seq.tokens.push_back(current);
      current.clear();
    }
  };
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (is_word_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : raw);
    } else {
      flush();
    }
  }
  flush();
  return seq;
}

Dictionary build_dictionary(std::span<const TokenSeq> seqs) {
  Dictionary dict;
  for (const auto& seq : seqs)
    for (const auto& tok : seq.tokens) dict.add(tok);
  return dict;
}

Corpus load_corpus(const std::filesystem::path& root,
                   const std::set<std::string>& stopwords) {
  namespace fs = std::filesystem;
  if (!fs::exists(root) || !fs::is_directory(root))
    fail(Errc::missing_root, "corpus root does not exist: " + root.string());

  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file())
      paths.push_back(entry.path().lexically_relative(root).generic_string());
  }
  if (paths.empty())
    fail(Errc::empty_corpus, "no files under corpus root: " + root.string());
  std::sort(paths.begin(), paths.end());

  Corpus corpus;
  corpus.files.reserve(paths.size());
  for (FileId id = 0; id < paths.size(); ++id) {
    std::ifstream in(root / paths[id], std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot read file: " + paths[id]);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (!valid_utf8(text))
      fail(Errc::decode_error, "file is not valid UTF-8 text: " + paths[id]);
    corpus.files.push_back({id, paths[id], tokenize(text, stopwords)});
  }
  std::vector<TokenSeq> seqs;
  seqs.reserve(corpus.files.size());
  for (const auto& f : corpus.files) seqs.push_back(f.tokens);
  corpus.dictionary = build_dictionary(seqs);
  return corpus;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot read stopword file: " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start])))
      ++start;
    if (start > 0) line.erase(0, start);
    if (line.empty()) continue;
    std::transform(line.begin(), line.end(), line.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    words.insert(line);
  }
  return words;
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {"a",  "an", "and", "the", "to",
                                              "for", "of", "in",  "on",  "is"};
  return words;
}

}  // namespace neuridx
