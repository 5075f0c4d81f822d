// Streaming PGN reader for the Lichess export dialect. Pulls one game at a
// time off a std::istream through a fixed-size chunk buffer, so memory use is
// bounded by the largest single game regardless of file size. Comments,
// NAGs and recursive variations are consumed and dropped; tag pairs and SAN
// tokens are kept verbatim.
#pragma once

#include <cctype>
#include <cstring>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "chessog/chess.hpp"
#include "chessog/errors.hpp"

namespace chessog {

namespace detail {

// Buffered byte puller with absolute offset / line bookkeeping for errors.
class ByteStream {
 public:
  explicit ByteStream(std::istream& in) : in_(in) { buf_.resize(64 * 1024); }

  int peek() {
    if (pos_ == len_ && !refill()) return -1;
    return static_cast<unsigned char>(buf_[pos_]);
  }

  int get() {
    if (pos_ == len_ && !refill()) return -1;
    char c = buf_[pos_++];
    ++offset_;
    at_line_start_ = c == '\n';
    if (at_line_start_) ++line_;
    return static_cast<unsigned char>(c);
  }

  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }
  bool at_line_start() const { return at_line_start_; }

 private:
  bool refill() {
    in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    len_ = static_cast<std::size_t>(in_.gcount());
    pos_ = 0;
    return len_ > 0;
  }

  std::istream& in_;
  std::vector<char> buf_;
  std::size_t pos_ = 0, len_ = 0;
  std::size_t offset_ = 0;
  std::size_t line_ = 1;
  bool at_line_start_ = true;
};

}  // namespace detail

// Pull parser: next() yields one GameRecord per game until the stream ends.
// Strict mode throws PgnSyntaxError; SkipAndContinue resynchronizes at the
// next tag section and counts the damage instead.
class PgnReader {
 public:
  enum class ErrorMode { Strict, SkipAndContinue };

  explicit PgnReader(std::istream& in, ErrorMode mode = ErrorMode::Strict)
      : bs_(in), mode_(mode) {}

  std::optional<GameRecord> next() {
    for (;;) {
      try {
        return parse_game();
      } catch (const PgnSyntaxError&) {
        if (mode_ == ErrorMode::Strict) throw;
        ++skipped_;
        resync();
        if (bs_.peek() < 0) return std::nullopt;
      }
    }
  }

  std::size_t games_skipped() const { return skipped_; }
  std::size_t games_parsed() const { return parsed_; }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw PgnSyntaxError(bs_.offset(), bs_.line(), what);
  }

  void skip_inter_token_space() {
    for (;;) {
      int c = bs_.peek();
      if (c == '%' && bs_.at_line_start()) {  // escape line, ignore wholesale
        while (c >= 0 && c != '\n') c = (bs_.get(), bs_.peek());
        continue;
      }
      if (c < 0 || !std::isspace(c)) return;
      bs_.get();
    }
  }

  // A blank line followed by a tag section means the '}' never came; bailing
  // there (instead of at EOF) is what lets skip-mode resynchronize.
  void skip_brace_comment() {
    bs_.get();  // '{'
    int newline_run = 0;
    for (;;) {
      if (newline_run >= 2 && bs_.peek() == '[') fail("unterminated { comment");
      int c = bs_.get();
      if (c < 0) fail("unterminated { comment");
      if (c == '}') return;
      if (c == '\n') {
        ++newline_run;
      } else if (c != '\r') {
        newline_run = 0;
      }
    }
  }

  void skip_line_comment() {
    for (int c = bs_.peek(); c >= 0 && c != '\n'; c = bs_.peek()) bs_.get();
  }

  std::pair<std::string, std::string> parse_tag_pair() {
    bs_.get();  // '['
    std::string name, value;
    skip_inter_token_space();
    for (int c = bs_.peek(); c >= 0 && !std::isspace(c) && c != '"';
         c = bs_.peek()) {
      name += static_cast<char>(bs_.get());
    }
    if (name.empty()) fail("tag pair without a name");
    skip_inter_token_space();
    if (bs_.get() != '"') fail("tag pair without a quoted value");
    for (;;) {
      int c = bs_.get();
      if (c < 0) fail("unterminated tag value");
      if (c == '"') break;
      if (c == '\\') {
        int e = bs_.get();
        if (e < 0) fail("unterminated tag value escape");
        value += static_cast<char>(e);
      } else {
        value += static_cast<char>(c);
      }
    }
    skip_inter_token_space();
    if (bs_.get() != ']') fail("tag pair without closing bracket");
    return {std::move(name), std::move(value)};
  }

  // One symbol token: run of characters that can appear in SAN tokens,
  // move numbers and result tokens.
  std::string read_symbol() {
    std::string tok;
    for (;;) {
      int c = bs_.peek();
      if (c < 0 || std::isspace(c) || c == '{' || c == '}' || c == '(' ||
          c == ')' || c == ';' || c == '[' || c == ']' || c == '$') {
        break;
      }
      tok += static_cast<char>(bs_.get());
    }
    return tok;
  }

  static bool is_move_number(const std::string& tok) {
    std::size_t i = 0;
    while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i])))
      ++i;
    if (i == 0) return tok.find_first_not_of('.') == std::string::npos;
    return tok.find_first_not_of('.', i) == std::string::npos;
  }

  std::optional<GameRecord> parse_game() {
    skip_inter_token_space();
    if (bs_.peek() < 0) return std::nullopt;

    GameRecord rec;
    while (bs_.peek() == '[') {
      rec.tags.push_back(parse_tag_pair());
      skip_inter_token_space();
    }

    int depth = 0;
    for (;;) {
      skip_inter_token_space();
      int c = bs_.peek();
      if (c < 0) fail("game ends without a result token");
      if (c == '{') {
        skip_brace_comment();
        continue;
      }
      if (c == ';') {
        skip_line_comment();
        continue;
      }
      if (c == '(') {
        bs_.get();
        ++depth;
        continue;
      }
      if (c == ')') {
        bs_.get();
        if (--depth < 0) fail("unmatched ')'");
        continue;
      }
      if (c == '$') {
        bs_.get();
        std::string nag = read_symbol();
        if (nag.empty()) fail("bare '$'");
        continue;
      }
      if (c == '[') fail("tag pair inside movetext (missing result token?)");

      std::string tok = read_symbol();
      if (tok.empty()) fail("unexpected character in movetext");
      if (auto res = result_from_token(tok)) {
        if (depth > 0) continue;  // a result inside a variation is just text
        rec.result = *res;
        ++parsed_;
        return rec;
      }
      if (is_move_number(tok)) continue;
      if (depth == 0) rec.moves.push_back(std::move(tok));
    }
  }

  // After an error: stand still if already at a tag section, otherwise drop
  // input until a blank line followed by '[' (the next game's tags).
  void resync() {
    if (bs_.at_line_start() && bs_.peek() == '[') return;
    int newline_run = bs_.at_line_start() ? 1 : 0;
    for (;;) {
      int c = bs_.peek();
      if (c < 0) return;
      if (newline_run >= 2 && c == '[') return;
      bs_.get();
      if (c == '\n') {
        ++newline_run;
      } else if (c != '\r') {
        newline_run = 0;
      }
    }
  }

  detail::ByteStream bs_;
  ErrorMode mode_;
  std::size_t skipped_ = 0;
  std::size_t parsed_ = 0;
};

// ---------------------------------------------------------------------------
// Tag-based game filters
// ---------------------------------------------------------------------------

// Rating / time control predicate. Games missing (or carrying unparseable
// values for) a referenced tag are excluded.
struct FilterSpec {
  std::optional<double> min_avg_rating;
  bool exclude_bullet = false;

  // Initial clock below this many seconds counts as bullet.
  static constexpr int kBulletBaseSeconds = 180;

  // Text form: comma/space separated "min-avg-rating=N" and "exclude-bullet".
  static FilterSpec parse(std::string_view text) {
    FilterSpec spec;
    std::size_t i = 0;
    auto next_item = [&]() -> std::optional<std::string_view> {
      while (i < text.size() && (text[i] == ',' || std::isspace(static_cast<unsigned char>(text[i])))) ++i;
      if (i >= text.size()) return std::nullopt;
      std::size_t start = i;
      while (i < text.size() && text[i] != ',' &&
             !std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
      return text.substr(start, i - start);
    };
    while (auto item = next_item()) {
      if (*item == "exclude-bullet") {
        spec.exclude_bullet = true;
      } else if (item->starts_with("min-avg-rating=")) {
        std::string num(item->substr(std::strlen("min-avg-rating=")));
        try {
          std::size_t used = 0;
          spec.min_avg_rating = std::stod(num, &used);
          if (used != num.size()) throw std::invalid_argument(num);
        } catch (const std::exception&) {
          throw BadPredicate("bad rating in filter item '" + std::string(*item) + "'");
        }
      } else {
        throw BadPredicate("unknown filter item '" + std::string(*item) + "'");
      }
    }
    return spec;
  }

  bool matches(const GameRecord& rec) const {
    if (min_avg_rating) {
      auto white = parse_int_tag(rec, "WhiteElo");
      auto black = parse_int_tag(rec, "BlackElo");
      if (!white || !black) return false;
      if ((*white + *black) / 2.0 < *min_avg_rating) return false;
    }
    if (exclude_bullet) {
      auto base = initial_clock_seconds(rec);
      if (!base || *base < kBulletBaseSeconds) return false;
    }
    return true;
  }

  static std::optional<int> parse_int_tag(const GameRecord& rec,
                                          std::string_view name) {
    const std::string* v = rec.tag(name);
    if (!v || v->empty()) return std::nullopt;
    int out = 0;
    for (char c : *v) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      out = out * 10 + (c - '0');
    }
    return out;
  }

  // TimeControl "base+increment"; "-" and friends yield nullopt.
  static std::optional<int> initial_clock_seconds(const GameRecord& rec) {
    const std::string* v = rec.tag("TimeControl");
    if (!v) return std::nullopt;
    std::size_t plus = v->find('+');
    std::string base = plus == std::string::npos ? *v : v->substr(0, plus);
    if (base.empty()) return std::nullopt;
    int out = 0;
    for (char c : base) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      out = out * 10 + (c - '0');
    }
    return out;
  }
};

// Iterator adapter over a PgnReader that yields only matching games.
class FilteredGames {
 public:
  FilteredGames(PgnReader& reader, FilterSpec spec)
      : reader_(reader), spec_(std::move(spec)) {}

  std::optional<GameRecord> next() {
    while (auto rec = reader_.next()) {
      if (spec_.matches(*rec)) return rec;
      ++dropped_;
    }
    return std::nullopt;
  }

  std::size_t games_dropped() const { return dropped_; }

 private:
  PgnReader& reader_;
  FilterSpec spec_;
  std::size_t dropped_ = 0;
};

inline FilteredGames filter_games(PgnReader& reader, FilterSpec spec) {
  return FilteredGames(reader, std::move(spec));
}

}  // namespace chessog
