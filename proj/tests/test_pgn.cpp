#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "chessog/pgn.hpp"

using namespace chessog;

namespace {

std::vector<GameRecord> parse_all(const std::string& text,
                                  PgnReader::ErrorMode mode =
                                      PgnReader::ErrorMode::Strict) {
  std::istringstream in(text);
  PgnReader reader(in, mode);
  std::vector<GameRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

const char* kMinimalGame =
    "[Event \"t\"]\n[Result \"1-0\"]\n\n1. e4 e5 1-0\n";

}  // namespace

TEST_CASE("empty input yields no games") {
  REQUIRE(parse_all("").empty());
  REQUIRE(parse_all("   \n\n  \n").empty());
}

TEST_CASE("minimal game parses") {
  auto games = parse_all(kMinimalGame);
  REQUIRE(games.size() == 1);
  REQUIRE(games[0].moves == std::vector<std::string>{"e4", "e5"});
  REQUIRE(games[0].result == GameResult::WhiteWins);
  REQUIRE(games[0].tags.size() == 2);
  REQUIRE(games[0].tags[0].first == "Event");
}

TEST_CASE("two concatenated games yield two records") {
  std::string two = std::string(kMinimalGame) + "\n" + kMinimalGame;
  auto games = parse_all(two);
  REQUIRE(games.size() == 2);
  REQUIRE(games[0].moves == games[1].moves);
}

TEST_CASE("the example game file parses to 63 tokens") {
  std::ifstream in(std::string(CHESSOG_FIXTURE_DIR) + "/remark_game.pgn");
  REQUIRE(in.good());
  PgnReader reader(in);
  auto rec = reader.next();
  REQUIRE(rec.has_value());
  REQUIRE(rec->moves.size() == 63);
  REQUIRE(rec->result == GameResult::WhiteWins);
  REQUIRE(rec->moves.front() == "b4");
  REQUIRE(rec->moves.back() == "Qd4#");
  REQUIRE(!reader.next().has_value());

  // token fidelity: the tokens replay to mate
  REQUIRE(is_checkmate(replay_game(*rec).final));
}

TEST_CASE("comments, NAGs and variations are consumed and discarded") {
  std::string text =
      "[Event \"x\"]\n\n"
      "1. e4 {king pawn [%eval 0.3] [%clk 0:03:00]} e5 $14 ; rest of line\n"
      "2. Nf3 (2. f4 exf4 (2... d6)) 2... Nc6 {nested { not special} *\n";
  auto games = parse_all(text);
  REQUIRE(games.size() == 1);
  REQUIRE(games[0].moves ==
          std::vector<std::string>{"e4", "e5", "Nf3", "Nc6"});
  REQUIRE(games[0].result == GameResult::Unknown);
}

TEST_CASE("a result token inside a variation does not end the game") {
  std::string text = "[A \"b\"]\n\n1. e4 (1. d4 d5 1/2-1/2) 1... e5 0-1\n";
  auto games = parse_all(text);
  REQUIRE(games.size() == 1);
  REQUIRE(games[0].result == GameResult::BlackWins);
  REQUIRE(games[0].moves == std::vector<std::string>{"e4", "e5"});
}

TEST_CASE("tag pairs preserve order and decode escapes") {
  std::string text =
      "[White \"O'Kelly, \\\"Alberic\\\"\"]\n[Black \"a \\\\ b\"]\n\n* \n";
  auto games = parse_all(text);
  REQUIRE(games.size() == 1);
  REQUIRE(games[0].tags[0].second == "O'Kelly, \"Alberic\"");
  REQUIRE(games[0].tags[1].second == "a \\ b");
}

TEST_CASE("escape lines starting with % are ignored") {
  std::string text = "%ignore this line\n[A \"b\"]\n\n1. e4 1-0\n";
  auto games = parse_all(text);
  REQUIRE(games.size() == 1);
  REQUIRE(games[0].moves == std::vector<std::string>{"e4"});
}

TEST_CASE("strict mode reports offset and line") {
  std::string text = "[Event \"x\"]\n\n1. e4 {never closed\n";
  std::istringstream in(text);
  PgnReader reader(in);
  try {
    reader.next();
    FAIL("expected PgnSyntaxError");
  } catch (const PgnSyntaxError& e) {
    REQUIRE(e.line() >= 3);
    REQUIRE(e.byte_offset() == text.size());
  }
}

TEST_CASE("missing result token is a syntax error") {
  std::string text = "[Event \"x\"]\n\n1. e4 e5\n\n[Event \"y\"]\n\n1. d4 1-0\n";
  REQUIRE_THROWS_AS(parse_all(text), PgnSyntaxError);
}

TEST_CASE("skip-and-continue recovers at the next game") {
  std::string text =
      "[Event \"good1\"]\n\n1. e4 e5 1-0\n\n"
      "[Event \"bad\"]\n\n1. e4 {broken comment\ngarbage ]] [[\n\n"
      "[Event \"good2\"]\n\n1. d4 d5 0-1\n";
  std::istringstream in(text);
  PgnReader reader(in, PgnReader::ErrorMode::SkipAndContinue);
  std::vector<GameRecord> games;
  while (auto rec = reader.next()) games.push_back(std::move(*rec));
  REQUIRE(games.size() == 2);
  REQUIRE(*games[0].tag("Event") == "good1");
  REQUIRE(*games[1].tag("Event") == "good2");
  REQUIRE(reader.games_skipped() == 1);
}

TEST_CASE("re-parsing the same bytes yields identical records") {
  std::string text =
      "[Event \"a\"]\n[WhiteElo \"2600\"]\n\n1. e4 e5 2. Nf3 $2 {x} Nc6 1/2-1/2\n";
  auto a = parse_all(text);
  auto b = parse_all(text);
  REQUIRE(a.size() == b.size());
  REQUIRE(a[0].tags == b[0].tags);
  REQUIRE(a[0].moves == b[0].moves);
  REQUIRE(a[0].result == b[0].result);
}

TEST_CASE("filter spec text form") {
  FilterSpec spec = FilterSpec::parse("min-avg-rating=2500, exclude-bullet");
  REQUIRE(spec.min_avg_rating == 2500.0);
  REQUIRE(spec.exclude_bullet);
  REQUIRE(FilterSpec::parse("").min_avg_rating == std::nullopt);
  REQUIRE_THROWS_AS(FilterSpec::parse("min-avg-rating=abc"), BadPredicate);
  REQUIRE_THROWS_AS(FilterSpec::parse("frobnicate"), BadPredicate);
}

namespace {
GameRecord with_tags(
    std::initializer_list<std::pair<const char*, const char*>> tags) {
  GameRecord rec;
  for (auto& [n, v] : tags) rec.tags.emplace_back(n, v);
  return rec;
}
}  // namespace

TEST_CASE("rating filter uses the game's average") {
  FilterSpec spec;
  spec.min_avg_rating = 2500;
  REQUIRE(spec.matches(with_tags({{"WhiteElo", "2600"}, {"BlackElo", "2520"}})));
  REQUIRE(!spec.matches(with_tags({{"WhiteElo", "2600"}, {"BlackElo", "2300"}})));
  // 2499.5 average is below the bar
  REQUIRE(!spec.matches(with_tags({{"WhiteElo", "2499"}, {"BlackElo", "2500"}})));
  // missing or junk tags exclude the game
  REQUIRE(!spec.matches(with_tags({{"WhiteElo", "2600"}})));
  REQUIRE(!spec.matches(with_tags({{"WhiteElo", "?"}, {"BlackElo", "2500"}})));
}

TEST_CASE("bullet filter decodes TimeControl base") {
  FilterSpec spec;
  spec.exclude_bullet = true;
  REQUIRE(!spec.matches(with_tags({{"TimeControl", "60+0"}})));
  REQUIRE(!spec.matches(with_tags({{"TimeControl", "120+1"}})));
  REQUIRE(spec.matches(with_tags({{"TimeControl", "180+0"}})));
  REQUIRE(spec.matches(with_tags({{"TimeControl", "600+5"}})));
  REQUIRE(!spec.matches(with_tags({{"TimeControl", "-"}})));
  REQUIRE(!spec.matches(with_tags({{"Event", "x"}})));
}

TEST_CASE("filter_games adapter drops and counts") {
  std::string text =
      "[WhiteElo \"2600\"]\n[BlackElo \"2550\"]\n\n1. e4 1-0\n\n"
      "[WhiteElo \"2100\"]\n[BlackElo \"2000\"]\n\n1. d4 0-1\n\n"
      "[WhiteElo \"2700\"]\n[BlackElo \"2650\"]\n\n1. c4 1/2-1/2\n";
  std::istringstream in(text);
  PgnReader reader(in);
  FilterSpec spec;
  spec.min_avg_rating = 2500;
  auto filtered = filter_games(reader, spec);
  std::vector<GameRecord> kept;
  while (auto rec = filtered.next()) kept.push_back(std::move(*rec));
  REQUIRE(kept.size() == 2);
  REQUIRE(filtered.games_dropped() == 1);
  REQUIRE(kept[0].moves == std::vector<std::string>{"e4"});
  REQUIRE(kept[1].moves == std::vector<std::string>{"c4"});
}
