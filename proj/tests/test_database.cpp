#include <filesystem>
#include <fstream>
#include <numeric>

#include <unistd.h>

#include <gtest/gtest.h>

#include "common.hpp"

using namespace dsgrn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("dsgrn-db-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

ErrorCode load_error(const fs::path& dir) {
  try {
    load_database(dir);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "loaded without error";
  return ErrorCode::InvalidArgument;
}

const char* const kContentFiles[] = {"network.txt", "morsegraphs.txt", "assignments.bin", "meta.txt"};

}  // namespace

TEST(Database, SaveLoadRoundTrip) {
  const auto& db = fixtures::database("bistable");
  auto dir = scratch("rt");
  save_database(db, dir);
  auto back = load_database(dir);
  EXPECT_EQ(back, db);
  EXPECT_EQ(back.built_at, db.built_at);
  auto again = scratch("rt2");
  save_database(back, again);
  for (const char* f : kContentFiles) EXPECT_EQ(fixtures::read_text(dir / f), fixtures::read_text(again / f)) << f;
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST(Database, WorkerCountDoesNotChangeOutput) {
  auto text = fixtures::read_text(fixtures::network_file("bistable"));
  const auto& pg = fixtures::parameter_graph("bistable");
  auto one = build_database(text, pg, 1);
  auto three = build_database(text, pg, 3);
  EXPECT_EQ(one, three);
  auto a = scratch("w1"), b = scratch("w3");
  save_database(one, a);
  save_database(three, b);
  for (const char* f : kContentFiles) EXPECT_EQ(fixtures::read_text(a / f), fixtures::read_text(b / f)) << f;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Database, IdsFollowFirstAppearance) {
  const auto& db = fixtures::database("bistable");
  std::uint32_t next = 0;
  for (auto id : db.assignment) {
    ASSERT_LE(id, next);
    if (id == next) ++next;
  }
  EXPECT_EQ(next, db.morse_graphs.size());
}

TEST(Database, MultiplicitiesSumToTotal) {
  for (const char* name : {"repressilator", "bistable"}) {
    const auto& db = fixtures::database(name);
    auto m = db.multiplicities();
    EXPECT_EQ(std::accumulate(m.begin(), m.end(), std::size_t{0}), fixtures::parameter_graph(name).size());
  }
}

TEST(Database, AssignmentMatchesDirectComputation) {
  const auto& db = fixtures::database("repressilator");
  const auto& pg = fixtures::parameter_graph("repressilator");
  for (ParameterIndex i = 0; i < pg.size(); ++i)
    EXPECT_EQ(db.morse_graphs[db.assignment[i]], canonical_form(parameter_morse_graph(pg, i)));
}

TEST(Database, LoadErrors) {
  const auto& db = fixtures::database("repressilator");
  EXPECT_EQ(load_error(scratch("missing")), ErrorCode::IoError);

  auto dir = scratch("trunc");
  save_database(db, dir);
  {
    auto bytes = fixtures::read_text(dir / "assignments.bin");
    std::ofstream out(dir / "assignments.bin", std::ios::binary | std::ios::trunc);
    out << bytes.substr(0, bytes.size() - 4);
  }
  EXPECT_EQ(load_error(dir), ErrorCode::ChecksumMismatch);

  save_database(db, dir);
  {
    auto meta = fixtures::read_text(dir / "meta.txt");
    meta.replace(0, meta.find('\n'), "dsgrndb 2");
    std::ofstream out(dir / "meta.txt", std::ios::trunc);
    out << meta;
  }
  EXPECT_EQ(load_error(dir), ErrorCode::FormatVersionMismatch);

  save_database(db, dir);
  {
    std::ofstream out(dir / "morsegraphs.txt", std::ios::app);
    out << "4\tFP;FP|\n";
  }
  EXPECT_EQ(load_error(dir), ErrorCode::ChecksumMismatch);
  fs::remove_all(dir);
}

TEST(Database, Queries) {
  const auto& rep = fixtures::database("repressilator");
  EXPECT_EQ(query(rep, "minimal:FC"), std::vector<ParameterIndex>{13});
  EXPECT_EQ(query(rep, "any:FP_ON").size(), 1u);
  EXPECT_EQ(query(rep, "nodes=1").size(), 27u);

  const auto& bis = fixtures::database("bistable");
  EXPECT_EQ(query(bis, "minimal-count(FP)>=2").size(), 22u);
  EXPECT_EQ(query(bis, "minimal:FP maximal:FC").size(), 2u);
  EXPECT_EQ(query(bis, "any:FC").size(), 8u);
  EXPECT_EQ(query(bis, "minimal:FC").size(), 6u);
  auto all = query(bis, "nodes>=1");
  EXPECT_EQ(all.size(), 216u);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
}

TEST(Database, ConjunctionNarrowsResults) {
  const auto& bis = fixtures::database("bistable");
  for (const char* extra : {"nodes=1", "nodes>1", "maximal:FC", "minimal-count(FP)<2"}) {
    auto wide = query(bis, "minimal:FP");
    auto narrow = query(bis, std::string("minimal:FP AND ") + extra);
    EXPECT_TRUE(std::includes(wide.begin(), wide.end(), narrow.begin(), narrow.end())) << extra;
  }
}

TEST(Database, MalformedQueries) {
  const auto& rep = fixtures::database("repressilator");
  for (const char* q : {"", "nodes~3", "somewhere:FC", "minimal:", "minimal-count(FP>=2", "nodes>=x", "bogus"}) {
    try {
      query(rep, q);
      ADD_FAILURE() << "accepted '" << q << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedQuery) << q;
    }
  }
}
