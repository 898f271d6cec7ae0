#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <boost/crc.hpp>

#include "dsgrn/error.hpp"
#include "dsgrn/morse.hpp"
#include "dsgrn/parameter_graph.hpp"
#include "dsgrn/phase_graphs.hpp"
#include "dsgrn/query.hpp"

namespace dsgrn {

inline constexpr std::string_view engine_version = "dsgrn-cpp 0.3.0";
inline constexpr std::string_view database_format = "dsgrndb 1";
inline constexpr std::size_t database_chunk = 4096;

/// Canonical Morse graph of every parameter, deduplicated into a table.
struct SignatureDatabase {
  std::string network_text;
  std::vector<std::string> morse_graphs;  // canonical forms, by id
  std::vector<std::uint32_t> assignment;  // morse graph id per ParameterIndex
  std::string engine = std::string(engine_version);
  // Build metadata; not part of equality.
  std::string built_at;
  double build_seconds = 0;

  std::size_t size() const { return assignment.size(); }

  std::vector<std::size_t> multiplicities() const {
    std::vector<std::size_t> counts(morse_graphs.size(), 0);
    for (auto id : assignment) ++counts[id];
    return counts;
  }

  friend bool operator==(const SignatureDatabase& a, const SignatureDatabase& b) {
    return a.network_text == b.network_text && a.morse_graphs == b.morse_graphs &&
           a.assignment == b.assignment && a.engine == b.engine;
  }
};

/// Morse graph of one parameter, computed from the domain graph.
inline MorseGraph parameter_morse_graph(const ParameterGraph& pg, ParameterIndex idx) {
  auto phi = pg.decode(idx);
  PhaseSpace ps(pg.network(), phi);
  return morse_graph(ps, domain_graph(ps));
}

inline SignatureDatabase build_database(std::string network_text, const ParameterGraph& pg,
                                        std::size_t workers = 1) {
  const auto start = std::chrono::steady_clock::now();
  const ParameterIndex total = pg.size();
  if (total > std::numeric_limits<std::uint32_t>::max())
    fail(ErrorCode::InvalidArgument, "parameter graph too large for 32-bit assignments");
  const std::size_t n_chunks = static_cast<std::size_t>((total + database_chunk - 1) / database_chunk);

  struct Chunk {
    std::vector<std::string> table;
    std::vector<std::uint32_t> ids;
  };
  std::vector<Chunk> chunks(n_chunks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    try {
      for (std::size_t c; (c = next.fetch_add(1)) < n_chunks;) {
        Chunk& chunk = chunks[c];
        std::unordered_map<std::string, std::uint32_t> local;
        const ParameterIndex lo = c * database_chunk;
        const ParameterIndex hi = std::min<ParameterIndex>(total, lo + database_chunk);
        chunk.ids.reserve(hi - lo);
        for (ParameterIndex i = lo; i < hi; ++i) {
          auto form = canonical_form(parameter_morse_graph(pg, i));
          auto [it, fresh] = local.try_emplace(form, static_cast<std::uint32_t>(chunk.table.size()));
          if (fresh) chunk.table.push_back(std::move(form));
          chunk.ids.push_back(it->second);
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = n_chunks;
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, n_chunks));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  // Merge in chunk order so ids follow first appearance by index.
  SignatureDatabase db;
  db.network_text = std::move(network_text);
  db.assignment.reserve(total);
  std::unordered_map<std::string, std::uint32_t> global;
  for (auto& chunk : chunks) {
    std::vector<std::uint32_t> remap;
    for (auto& form : chunk.table) {
      auto [it, fresh] = global.try_emplace(form, static_cast<std::uint32_t>(db.morse_graphs.size()));
      if (fresh) db.morse_graphs.push_back(form);
      remap.push_back(it->second);
    }
    for (auto id : chunk.ids) db.assignment.push_back(remap[id]);
    chunk = {};
  }
  db.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::time_t now = std::time(nullptr);
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  db.built_at = stamp.str();
  return db;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorCode::IoError, "short write to " + path.string());
}

inline std::string encode_assignments(const std::vector<std::uint32_t>& ids) {
  std::string bytes(ids.size() * 4, '\0');
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<char>((ids[i] >> (8 * b)) & 0xff);
  return bytes;
}

inline std::string encode_table(const std::vector<std::string>& forms) {
  std::string out;
  for (std::size_t i = 0; i < forms.size(); ++i) out += std::to_string(i) + '\t' + forms[i] + '\n';
  return out;
}

inline std::uint32_t content_checksum(std::string_view network, std::string_view table,
                                      std::string_view assignments) {
  boost::crc_32_type crc;
  for (auto part : {network, table, assignments}) crc.process_bytes(part.data(), part.size());
  return crc.checksum();
}

inline std::string hex32(std::uint32_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(8) << std::setfill('0') << v;
  return s.str();
}

}  // namespace detail

/// Writes the database directory. The content files are a pure function of
/// the database; build time and duration go to build.txt.
inline void save_database(const SignatureDatabase& db, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  const std::string table = detail::encode_table(db.morse_graphs);
  const std::string assignments = detail::encode_assignments(db.assignment);
  std::ostringstream meta;
  meta << database_format << '\n'
       << "total " << db.assignment.size() << '\n'
       << "morsegraphs " << db.morse_graphs.size() << '\n'
       << "engine " << db.engine << '\n'
       << "width 32\n"
       << "checksum " << detail::hex32(detail::content_checksum(db.network_text, table, assignments)) << '\n';
  detail::write_file(dir / "network.txt", db.network_text);
  detail::write_file(dir / "morsegraphs.txt", table);
  detail::write_file(dir / "assignments.bin", assignments);
  detail::write_file(dir / "meta.txt", meta.str());
  std::ostringstream build;
  build << "built " << db.built_at << '\n' << "seconds " << db.build_seconds << '\n';
  detail::write_file(dir / "build.txt", build.str());
}

inline SignatureDatabase load_database(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) fail(ErrorCode::IoError, "no database at " + dir.string());
  std::istringstream meta(detail::read_file(dir / "meta.txt"));
  std::string line;
  std::getline(meta, line);
  if (line != database_format)
    fail(ErrorCode::FormatVersionMismatch, "expected '" + std::string(database_format) + "', found '" + line + "'");
  std::size_t total = 0, width = 32, n_graphs = 0;
  std::string checksum, engine;
  while (std::getline(meta, line)) {
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "total") fields >> total;
    else if (key == "morsegraphs") fields >> n_graphs;
    else if (key == "width") fields >> width;
    else if (key == "checksum") fields >> checksum;
    else if (key == "engine") std::getline(fields >> std::ws, engine);
  }
  if (width != 32) fail(ErrorCode::FormatVersionMismatch, "unsupported id width " + std::to_string(width));

  SignatureDatabase db;
  db.network_text = detail::read_file(dir / "network.txt");
  const std::string table = detail::read_file(dir / "morsegraphs.txt");
  const std::string assignments = detail::read_file(dir / "assignments.bin");
  if (detail::hex32(detail::content_checksum(db.network_text, table, assignments)) != checksum)
    fail(ErrorCode::ChecksumMismatch, "database content does not match its checksum");
  if (assignments.size() != total * 4)
    fail(ErrorCode::ChecksumMismatch, "assignment file has the wrong length");
  db.engine = engine;

  std::istringstream rows(table);
  while (std::getline(rows, line)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos || std::stoul(line.substr(0, tab)) != db.morse_graphs.size())
      fail(ErrorCode::IoError, "bad morsegraphs.txt row");
    db.morse_graphs.push_back(line.substr(tab + 1));
  }
  if (db.morse_graphs.size() != n_graphs) fail(ErrorCode::IoError, "morse graph count mismatch");
  db.assignment.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t(static_cast<unsigned char>(assignments[4 * i + b])) << (8 * b);
    if (v >= db.morse_graphs.size()) fail(ErrorCode::IoError, "assignment refers to unknown Morse graph");
    db.assignment[i] = v;
  }
  if (std::filesystem::exists(dir / "build.txt")) {
    std::istringstream build(detail::read_file(dir / "build.txt"));
    while (std::getline(build, line)) {
      std::istringstream fields(line);
      std::string key;
      fields >> key;
      if (key == "built") fields >> db.built_at;
      else if (key == "seconds") fields >> db.build_seconds;
    }
  }
  return db;
}

/// Ascending indices whose Morse graph satisfies every clause.
inline std::vector<ParameterIndex> query(const SignatureDatabase& db, const QuerySpec& q) {
  std::vector<bool> ok;
  for (const auto& form : db.morse_graphs) ok.push_back(q.matches(parse_canonical(form)));
  std::vector<ParameterIndex> out;
  for (std::size_t i = 0; i < db.assignment.size(); ++i)
    if (ok[db.assignment[i]]) out.push_back(i);
  return out;
}

inline std::vector<ParameterIndex> query(const SignatureDatabase& db, std::string_view text) {
  return query(db, parse_query(text));
}

}  // namespace dsgrn
