// The Chessography block cipher, reconstructed in three mixing variants:
//
//   Faithful  (code XOR key) mod 71      -- the original rule; loses
//                                           information whenever the XOR
//                                           leaves the 0..70 range
//   Repaired  ((code-1 + key) mod 71)+1  -- minimal reversible replacement
//   Otp64     code XOR key over 0..63    -- 64-character alphabet with 6-bit
//                                           keys; plain one-time-pad mixing
//
// A block is 32 characters. Character i is written onto starting square i
// (canonical order a1-h1, a2-h2, a7-h7, a8-h8), mixed with key entry i, and
// then carried around the board by replaying a chess game. The ciphertext is
// the final placement plus a capture log, which together always account for
// all 32 positions.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chessog/chess.hpp"
#include "chessog/errors.hpp"

namespace chessog {

// ---------------------------------------------------------------------------
// Alphabet: 71 characters <-> codes 1..71
// ---------------------------------------------------------------------------

class Alphabet {
 public:
  static constexpr int kSize = 71;

  explicit Alphabet(std::string_view chars) {
    if (chars.size() != kSize) {
      throw DomainError("alphabet needs exactly 71 characters, got " +
                        std::to_string(chars.size()));
    }
    code_of_.fill(0);
    for (int i = 0; i < kSize; ++i) {
      unsigned char c = static_cast<unsigned char>(chars[i]);
      if (code_of_[c] != 0) {
        throw DomainError(std::string("duplicate alphabet character '") +
                          chars[i] + "'");
      }
      code_of_[c] = static_cast<int16_t>(i + 1);
    }
    chars_.assign(chars);
  }

  // Letters, digits, space, then . , ; : ? ! ' -
  static const Alphabet& standard() {
    static const Alphabet a(
        "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
        "abcdefghijklmnopqrstuvwxyz"
        "0123456789"
        " .,;:?!'-");
    return a;
  }

  bool contains(char c) const {
    return code_of_[static_cast<unsigned char>(c)] != 0;
  }

  int encode(char c) const {
    int code = code_of_[static_cast<unsigned char>(c)];
    if (code == 0) {
      throw CharNotInAlphabet(std::string("character '") + c +
                              "' is not in the alphabet");
    }
    return code;
  }

  char decode(int code) const {
    if (code < 1 || code > kSize) {
      throw DomainError("code " + std::to_string(code) + " outside 1..71");
    }
    return chars_[code - 1];
  }

  const std::string& characters() const { return chars_; }

 private:
  std::string chars_;
  std::array<int16_t, 256> code_of_{};
};

inline int encode_char(const Alphabet& a, char c) { return a.encode(c); }
inline char decode_char(const Alphabet& a, int code) { return a.decode(code); }

// ---------------------------------------------------------------------------
// Variants and key mixing
// ---------------------------------------------------------------------------

enum class Variant : uint8_t { Faithful, Repaired, Otp64 };

inline std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Faithful: return "faithful";
    case Variant::Repaired: return "repaired";
    default: return "otp64";
  }
}

inline std::optional<Variant> variant_from_name(std::string_view name) {
  if (name == "faithful") return Variant::Faithful;
  if (name == "repaired") return Variant::Repaired;
  if (name == "otp64") return Variant::Otp64;
  return std::nullopt;
}

// Inclusive input/output ranges per variant.
struct VariantDomain {
  int code_min, code_max;
  int key_min, key_max;
  int mixed_min, mixed_max;

  int mixed_cells() const { return mixed_max - mixed_min + 1; }
  int key_cells() const { return key_max - key_min + 1; }
};

constexpr VariantDomain domain_of(Variant v) {
  switch (v) {
    case Variant::Faithful: return {1, 71, 0, 255, 0, 70};
    case Variant::Repaired: return {1, 71, 0, 255, 1, 71};
    default: return {0, 63, 0, 63, 0, 63};
  }
}

namespace detail {

inline void check_range(int value, int lo, int hi, const char* what) {
  if (value < lo || value > hi) {
    throw DomainError(std::string(what) + " " + std::to_string(value) +
                      " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
}

}  // namespace detail

inline int key_mix(int code, int key, Variant v) {
  const VariantDomain d = domain_of(v);
  detail::check_range(code, d.code_min, d.code_max, "code");
  detail::check_range(key, d.key_min, d.key_max, "key");
  switch (v) {
    case Variant::Faithful: return (code ^ key) % 71;
    case Variant::Repaired: return (code - 1 + key) % 71 + 1;
    default: return code ^ key;
  }
}

// All preimages of a mixed value under one key, ascending. A singleton means
// clean decryption; Faithful can produce several candidates or none at all.
struct UnmixResult {
  std::vector<int> candidates;

  bool unique() const { return candidates.size() == 1; }
  int code() const { return candidates.front(); }
  bool ambiguous() const { return candidates.size() > 1; }
};

inline UnmixResult key_unmix(int mixed, int key, Variant v) {
  const VariantDomain d = domain_of(v);
  detail::check_range(mixed, d.mixed_min, d.mixed_max, "mixed code");
  detail::check_range(key, d.key_min, d.key_max, "key");
  UnmixResult r;
  switch (v) {
    case Variant::Faithful:
      for (int x = 1; x <= 71; ++x) {
        if ((x ^ key) % 71 == mixed) r.candidates.push_back(x);
      }
      if (r.candidates.empty()) {
        throw NoPreimage("no code maps to " + std::to_string(mixed) +
                         " under key " + std::to_string(key));
      }
      break;
    case Variant::Repaired:
      r.candidates.push_back((mixed - 1 - key % 71 + 71) % 71 + 1);
      break;
    default:
      r.candidates.push_back(mixed ^ key);
      break;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Keys
// ---------------------------------------------------------------------------

using Key1 = std::array<int, 32>;

inline void validate_key(const Key1& key, Variant v) {
  const VariantDomain d = domain_of(v);
  for (int k : key) detail::check_range(k, d.key_min, d.key_max, "key entry");
}

struct KeySchedule {
  enum class Mode { PerBlockFreshKey, SameKeyAllBlocks };

  Mode mode = Mode::SameKeyAllBlocks;
  std::vector<Key1> keys;

  const Key1& key_for_block(std::size_t block, std::size_t total_blocks) const {
    if (mode == Mode::SameKeyAllBlocks) {
      if (keys.size() != 1) {
        throw DomainError("same-key schedule needs exactly one key, has " +
                          std::to_string(keys.size()));
      }
      return keys.front();
    }
    if (keys.size() != total_blocks) {
      throw DomainError("fresh-key schedule needs one key per block: " +
                        std::to_string(keys.size()) + " keys for " +
                        std::to_string(total_blocks) + " blocks");
    }
    return keys[block];
  }
};

// ---------------------------------------------------------------------------
// Ciphertext
// ---------------------------------------------------------------------------

struct SurvivorEntry {
  Square square;  // where the piece stands on the final board
  int code;       // mixed code it carries

  bool operator==(const SurvivorEntry&) const = default;
};

struct CaptureLogEntry {
  int ply;        // 1-based ply at which the capture happened
  Square origin;  // starting square of the captured piece
  int code;       // mixed code it carried

  bool operator==(const CaptureLogEntry&) const = default;
};

struct Ciphertext {
  Variant variant = Variant::Faithful;
  std::vector<SurvivorEntry> survivors;      // square-name ascending
  std::vector<CaptureLogEntry> capture_log;  // ply ascending
  std::string game_id = "-";

  bool operator==(const Ciphertext&) const = default;
};

// ---------------------------------------------------------------------------
// Block encryption
// ---------------------------------------------------------------------------

namespace detail {

// Pads to 32 with spaces and encodes into the variant's code domain.
inline std::array<int, 32> block_codes(std::string_view plaintext,
                                       const Alphabet& alphabet, Variant v) {
  if (plaintext.size() > 32) {
    throw DomainError("plaintext block longer than 32 characters");
  }
  std::array<int, 32> codes;
  for (int i = 0; i < 32; ++i) {
    char c = i < static_cast<int>(plaintext.size()) ? plaintext[i] : ' ';
    int code = alphabet.encode(c);
    if (v == Variant::Otp64) {
      code -= 1;  // recode 1..64 -> 0..63
      if (code > 63) {
        throw CharNotInAlphabet(
            std::string("character '") + c +
            "' is beyond the 64-character otp64 alphabet");
      }
    }
    codes[i] = code;
  }
  return codes;
}

}  // namespace detail

inline Ciphertext encrypt_block(std::string_view plaintext, const Key1& key,
                                const GameRecord& game, Variant variant,
                                const Alphabet& alphabet = Alphabet::standard(),
                                std::string game_id = "-") {
  validate_key(key, variant);
  const std::array<int, 32> codes =
      detail::block_codes(plaintext, alphabet, variant);

  std::array<int, 32> mixed;
  for (int i = 0; i < 32; ++i) mixed[i] = key_mix(codes[i], key[i], variant);

  ReplayResult replay = replay_game(game);

  Ciphertext ct;
  ct.variant = variant;
  ct.game_id = std::move(game_id);
  for (const TraceEntry& t : replay.trace) {
    if (t.captured) {
      ct.capture_log.push_back(CaptureLogEntry{
          t.ply, canonical_start_square(t.captured->tag),
          mixed[t.captured->tag]});
    }
  }
  for (int i = 0; i < 64; ++i) {
    Square s(i);
    int8_t tag = replay.final.tag_at(s);
    if (tag != kNoTag) ct.survivors.push_back(SurvivorEntry{s, mixed[tag]});
  }
  std::sort(ct.survivors.begin(), ct.survivors.end(),
            [](const SurvivorEntry& a, const SurvivorEntry& b) {
              return a.square.name() < b.square.name();
            });
  return ct;
}

// ---------------------------------------------------------------------------
// Block decryption
// ---------------------------------------------------------------------------

namespace detail {

// Replays the game and maps every ciphertext observation back to the block
// position (0..31) it came from. Throws GameMismatch when the ciphertext
// cannot have been produced by this game.
inline std::array<int, 32> recover_mixed_codes(const Ciphertext& ct,
                                               const GameRecord& game) {
  ReplayResult replay = replay_game(game);

  std::array<int, 32> mixed;
  std::array<bool, 32> seen{};
  auto assign = [&](int tag, int code, const char* via) {
    if (tag < 0 || tag >= 32) {
      throw GameMismatch(std::string("no piece provenance for a ") + via +
                         " entry");
    }
    if (seen[tag]) {
      throw GameMismatch("position " + std::to_string(tag + 1) +
                         " appears twice in the ciphertext");
    }
    seen[tag] = true;
    mixed[tag] = code;
  };

  if (ct.survivors.size() !=
      static_cast<std::size_t>(replay.final.count_pieces(Color::White) +
                               replay.final.count_pieces(Color::Black))) {
    throw GameMismatch("survivor count does not match the final position");
  }
  for (const SurvivorEntry& s : ct.survivors) {
    if (!s.square.valid() || replay.final.empty(s.square)) {
      throw GameMismatch("no piece on survivor square " + s.square.name());
    }
    assign(replay.final.tag_at(s.square), s.code, "survivor");
  }

  std::size_t log_idx = 0;
  for (const TraceEntry& t : replay.trace) {
    if (!t.captured) continue;
    if (log_idx >= ct.capture_log.size()) {
      throw GameMismatch("capture log shorter than the game's captures");
    }
    const CaptureLogEntry& e = ct.capture_log[log_idx++];
    if (e.ply != t.ply ||
        e.origin != canonical_start_square(t.captured->tag)) {
      throw GameMismatch("capture log entry " + std::to_string(log_idx) +
                         " does not match the game (ply " +
                         std::to_string(t.ply) + ")");
    }
    assign(t.captured->tag, e.code, "capture-log");
  }
  if (log_idx != ct.capture_log.size()) {
    throw GameMismatch("capture log longer than the game's captures");
  }
  // seen[] is now all-true: 32 pieces exist and none was assigned twice.
  return mixed;
}

}  // namespace detail

// One block position whose plaintext cannot be pinned down.
struct PositionAmbiguity {
  int position;  // 1..32
  std::vector<char> candidates;

  bool operator==(const PositionAmbiguity&) const = default;
};

struct DecryptResult {
  std::string plaintext;  // '*' marks ambiguous positions
  std::vector<PositionAmbiguity> ambiguities;

  bool exact() const { return ambiguities.empty(); }
};

inline DecryptResult decrypt_block(const Ciphertext& ct, const Key1& key,
                                   const GameRecord& game, Variant variant,
                                   const Alphabet& alphabet =
                                       Alphabet::standard()) {
  if (ct.variant != variant) {
    throw GameMismatch(std::string("ciphertext was produced by variant '") +
                       std::string(variant_name(ct.variant)) + "'");
  }
  validate_key(key, variant);
  const std::array<int, 32> mixed = detail::recover_mixed_codes(ct, game);

  DecryptResult out;
  out.plaintext.resize(32, '*');
  for (int i = 0; i < 32; ++i) {
    UnmixResult u = key_unmix(mixed[i], key[i], variant);
    if (u.unique()) {
      int code = u.code();
      out.plaintext[i] =
          alphabet.decode(variant == Variant::Otp64 ? code + 1 : code);
    } else {
      PositionAmbiguity amb{i + 1, {}};
      for (int code : u.candidates) {
        amb.candidates.push_back(
            alphabet.decode(variant == Variant::Otp64 ? code + 1 : code));
      }
      out.ambiguities.push_back(std::move(amb));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multi-block messages
// ---------------------------------------------------------------------------

// SameKeyAllBlocks reuses games[0] for every block; PerBlockFreshKey pairs
// block i with games[i]. The last block is space-padded, so a message whose
// real text ends in spaces will not round-trip those spaces.
inline std::vector<Ciphertext> encrypt_message(
    std::string_view text, const KeySchedule& schedule,
    std::span<const GameRecord> games, Variant variant,
    const Alphabet& alphabet = Alphabet::standard()) {
  const std::size_t blocks = (text.size() + 31) / 32;
  if (games.empty()) throw DomainError("no game supplied");
  if (schedule.mode == KeySchedule::Mode::PerBlockFreshKey) {
    if (games.size() != blocks) {
      throw DomainError("fresh-key mode needs one game per block: " +
                        std::to_string(games.size()) + " games for " +
                        std::to_string(blocks) + " blocks");
    }
  } else if (games.size() != 1) {
    throw DomainError("same-key mode uses a single game");
  }

  std::vector<Ciphertext> out;
  out.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::string_view chunk = text.substr(b * 32, 32);
    const GameRecord& game =
        schedule.mode == KeySchedule::Mode::PerBlockFreshKey ? games[b]
                                                             : games[0];
    out.push_back(encrypt_block(chunk, schedule.key_for_block(b, blocks), game,
                                variant, alphabet,
                                "block" + std::to_string(b + 1)));
  }
  return out;
}

struct MessageDecryptResult {
  std::string plaintext;  // trailing pad spaces stripped
  std::vector<std::pair<std::size_t, PositionAmbiguity>> ambiguities;  // (block, pos)

  bool exact() const { return ambiguities.empty(); }
};

inline MessageDecryptResult decrypt_message(
    std::span<const Ciphertext> blocks, const KeySchedule& schedule,
    std::span<const GameRecord> games, Variant variant,
    const Alphabet& alphabet = Alphabet::standard()) {
  MessageDecryptResult out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const GameRecord& game =
        schedule.mode == KeySchedule::Mode::PerBlockFreshKey ? games[b]
                                                             : games[0];
    DecryptResult r = decrypt_block(
        blocks[b], schedule.key_for_block(b, blocks.size()), game, variant,
        alphabet);
    out.plaintext += r.plaintext;
    for (PositionAmbiguity& a : r.ambiguities) {
      out.ambiguities.emplace_back(b, std::move(a));
    }
  }
  while (!out.plaintext.empty() && out.plaintext.back() == ' ') {
    out.plaintext.pop_back();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization (line-based, UTF-8)
//
//   CHG1 <variant> <game-id>
//   S <n>
//   <square> <code>        n lines, square-name ascending
//   C <m>
//   <ply> <origin-square> <code>   m lines, ply ascending
// ---------------------------------------------------------------------------

inline std::string serialize(const Ciphertext& ct) {
  if (ct.game_id.empty() ||
      ct.game_id.find_first_of(" \t\r\n") != std::string::npos) {
    throw DomainError("game id must be a non-empty whitespace-free token");
  }
  std::string out;
  out += "CHG1 ";
  out += variant_name(ct.variant);
  out += ' ';
  out += ct.game_id;
  out += '\n';
  out += "S " + std::to_string(ct.survivors.size()) + "\n";
  for (const SurvivorEntry& s : ct.survivors) {
    out += s.square.name() + " " + std::to_string(s.code) + "\n";
  }
  out += "C " + std::to_string(ct.capture_log.size()) + "\n";
  for (const CaptureLogEntry& e : ct.capture_log) {
    out += std::to_string(e.ply) + " " + e.origin.name() + " " +
           std::to_string(e.code) + "\n";
  }
  return out;
}

namespace detail {

class LineLexer {
 public:
  explicit LineLexer(std::string_view text) : text_(text) {}

  std::optional<std::string_view> next_line() {
    if (pos_ >= text_.size()) return std::nullopt;
    prev_pos_ = pos_;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++lineno_;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  // Un-reads the line just returned (single step only).
  void push_back() {
    pos_ = prev_pos_;
    --lineno_;
  }

  std::size_t lineno() const { return lineno_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t prev_pos_ = 0;
  std::size_t lineno_ = 0;
};

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline int parse_int_field(std::string_view f, std::size_t lineno,
                           const char* what) {
  int value = 0;
  if (f.empty() || f.size() > 9) throw ParseError(lineno, std::string("bad ") + what);
  for (char c : f) {
    if (c < '0' || c > '9') {
      throw ParseError(lineno, std::string("bad ") + what + " '" +
                                   std::string(f) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace detail

namespace detail {

inline Ciphertext parse_one_ciphertext(LineLexer& lex) {
  auto require_line = [&]() -> std::string_view {
    auto line = lex.next_line();
    if (!line) throw ParseError(lex.lineno() + 1, "unexpected end of input");
    return *line;
  };

  Ciphertext ct;
  {
    auto fields = detail::split_fields(require_line());
    if (fields.size() != 3 || fields[0] != "CHG1") {
      throw ParseError(lex.lineno(), "expected header 'CHG1 <variant> <game-id>'");
    }
    auto v = variant_from_name(fields[1]);
    if (!v) {
      throw ParseError(lex.lineno(),
                       "unknown variant '" + std::string(fields[1]) + "'");
    }
    ct.variant = *v;
    ct.game_id = std::string(fields[2]);
  }
  {
    auto fields = detail::split_fields(require_line());
    if (fields.size() != 2 || fields[0] != "S") {
      throw ParseError(lex.lineno(), "expected survivor header 'S <n>'");
    }
    int n = detail::parse_int_field(fields[1], lex.lineno(), "survivor count");
    std::string prev;
    for (int i = 0; i < n; ++i) {
      auto sf = detail::split_fields(require_line());
      if (sf.size() != 2) {
        throw ParseError(lex.lineno(), "expected '<square> <code>'");
      }
      Square sq = Square::from_name(sf[0]);
      if (!prev.empty() && prev >= std::string(sf[0])) {
        throw ParseError(lex.lineno(), "survivors not in ascending square order");
      }
      prev = std::string(sf[0]);
      ct.survivors.push_back(SurvivorEntry{
          sq, detail::parse_int_field(sf[1], lex.lineno(), "code")});
    }
  }
  {
    auto fields = detail::split_fields(require_line());
    if (fields.size() != 2 || fields[0] != "C") {
      throw ParseError(lex.lineno(), "expected capture header 'C <m>'");
    }
    int m = detail::parse_int_field(fields[1], lex.lineno(), "capture count");
    int prev_ply = 0;
    for (int i = 0; i < m; ++i) {
      auto cf = detail::split_fields(require_line());
      if (cf.size() != 3) {
        throw ParseError(lex.lineno(), "expected '<ply> <origin-square> <code>'");
      }
      CaptureLogEntry e{detail::parse_int_field(cf[0], lex.lineno(), "ply"),
                        Square::from_name(cf[1]),
                        detail::parse_int_field(cf[2], lex.lineno(), "code")};
      if (e.ply <= prev_ply) {
        throw ParseError(lex.lineno(), "capture log not in ascending ply order");
      }
      prev_ply = e.ply;
      ct.capture_log.push_back(e);
    }
  }
  if (ct.survivors.size() + ct.capture_log.size() != 32) {
    throw ParseError(lex.lineno(),
                     "survivors + capture log must account for 32 positions");
  }
  return ct;
}

}  // namespace detail

inline Ciphertext deserialize(std::string_view text) {
  detail::LineLexer lex(text);
  Ciphertext ct = detail::parse_one_ciphertext(lex);
  while (auto line = lex.next_line()) {
    if (!line->empty()) {
      throw ParseError(lex.lineno(), "trailing content after capture log");
    }
  }
  return ct;
}

// Multiple concatenated ciphertext blocks (a multi-block message file).
inline std::vector<Ciphertext> deserialize_all(std::string_view text) {
  detail::LineLexer lex(text);
  std::vector<Ciphertext> out;
  for (;;) {
    // skip blank separator lines, stop at end of input
    bool more = false;
    while (auto line = lex.next_line()) {
      if (!line->empty()) {
        lex.push_back();
        more = true;
        break;
      }
    }
    if (!more) break;
    out.push_back(detail::parse_one_ciphertext(lex));
  }
  return out;
}

}  // namespace chessog
