#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "neuridx/corpus.hpp"

namespace testutil {

/// Unique scratch directory removed at scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("neuridx_" + tag + "_" + std::to_string(counter.fetch_add(1)) +
             "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

/// In-memory corpus from literal documents; paths are d0.txt, d1.txt, ...
/// in the given order (already sorted).
inline neuridx::Corpus make_corpus(const std::vector<std::string>& docs,
                                   const std::set<std::string>& stopwords) {
  neuridx::Corpus corpus;
  std::vector<neuridx::TokenSeq> seqs;
  for (neuridx::FileId id = 0; id < docs.size(); ++id) {
    neuridx::CorpusFile file;
    file.id = id;
    file.path = "d" + std::to_string(id) + ".txt";
    file.tokens = neuridx::tokenize(docs[id], stopwords);
    seqs.push_back(file.tokens);
    corpus.files.push_back(std::move(file));
  }
  corpus.dictionary = neuridx::build_dictionary(seqs);
  return corpus;
}

}  // namespace testutil
