#include "neuridx/classical_index.hpp"

#include <algorithm>

#include "neuridx/error.hpp"
#include "neuridx/io.hpp"

namespace neuridx {

namespace {
constexpr char kMagic[4] = {'C', 'D', 'X', '1'};
}

ClassicalIndex build_classical(const TokenSeq& seq, const Dictionary& dict,
                               FileId file_id) {
  ClassicalIndex idx;
  idx.file_id = file_id;
  idx.token_count = static_cast<std::uint32_t>(seq.tokens.size());
  for (std::uint32_t pos = 0; pos < seq.tokens.size(); ++pos) {
    auto kid = dict.id_of(seq.tokens[pos]);
    if (!kid)
      fail(Errc::unknown_token,
           "token not in dictionary: " + seq.tokens[pos]);
    idx.postings[*kid].push_back(pos);
  }
  idx.max_occurrences = 1;
  for (const auto& [kid, positions] : idx.postings)
    idx.max_occurrences = std::max(
        idx.max_occurrences, static_cast<std::uint32_t>(positions.size()));
  return idx;
}

std::optional<std::uint32_t> lookup(const ClassicalIndex& idx, KeywordId kid,
                                    std::uint32_t ordinal) {
  auto it = idx.postings.find(kid);
  if (it == idx.postings.end() || ordinal < 1 || ordinal > it->second.size())
    return std::nullopt;
  return it->second[ordinal - 1];
}

std::uint32_t match_count(const ClassicalIndex& idx, KeywordId kid) {
  auto it = idx.postings.find(kid);
  return it == idx.postings.end()
             ? 0
             : static_cast<std::uint32_t>(it->second.size());
}

void persist_classical(const ClassicalIndex& idx,
                       const std::filesystem::path& path) {
  auto out = io::open_out(path);
  io::write_magic(out, kMagic);
  nlohmann::json header{{"file_id", idx.file_id},
                        {"L", idx.token_count},
                        {"n_max", idx.max_occurrences},
                        {"num_keywords", idx.postings.size()}};
  io::write_json_block(out, header);
  for (const auto& [kid, positions] : idx.postings) {
    io::write_u32(out, kid);
    io::write_u32(out, static_cast<std::uint32_t>(positions.size()));
    for (std::uint32_t p : positions) io::write_u32(out, p);
  }
}

ClassicalIndex load_classical(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  io::expect_magic(in, kMagic);
  nlohmann::json header = io::read_json_block(in);
  ClassicalIndex idx;
  idx.file_id = header.at("file_id").get<FileId>();
  idx.token_count = header.at("L").get<std::uint32_t>();
  idx.max_occurrences = header.at("n_max").get<std::uint32_t>();
  auto num_keywords = header.at("num_keywords").get<std::uint32_t>();
  for (std::uint32_t i = 0; i < num_keywords; ++i) {
    KeywordId kid = io::read_u32(in);
    std::uint32_t count = io::read_u32(in);
    auto& positions = idx.postings[kid];
    positions.resize(count);
    for (std::uint32_t j = 0; j < count; ++j) positions[j] = io::read_u32(in);
  }
  return idx;
}

}  // namespace neuridx
