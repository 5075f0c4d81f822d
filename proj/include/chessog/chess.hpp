// Chess board representation, legal move generation, SAN resolution and game
// replay. Mailbox board (8x8 array) with copy-make legality filtering; every
// piece carries an optional one-byte tag that travels with it through moves,
// castling and promotion, and is surrendered on capture. Tags give downstream
// code (the cipher, the weak-game scorer) piece provenance for free.
#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chessog/errors.hpp"

namespace chessog {

// ---------------------------------------------------------------------------
// Squares and pieces
// ---------------------------------------------------------------------------

// Board square, index = file + 8*rank, so a1=0, h1=7, a8=56, h8=63.
class Square {
 public:
  constexpr Square() = default;
  constexpr explicit Square(int index) : index_(static_cast<int8_t>(index)) {}
  constexpr Square(int file, int rank)
      : index_(static_cast<int8_t>(rank * 8 + file)) {}

  static Square from_name(std::string_view name) {
    if (name.size() != 2 || name[0] < 'a' || name[0] > 'h' || name[1] < '1' ||
        name[1] > '8') {
      throw ParseError(0, "bad square name '" + std::string(name) + "'");
    }
    return Square(name[0] - 'a', name[1] - '1');
  }

  constexpr int index() const { return index_; }
  constexpr int file() const { return index_ & 7; }
  constexpr int rank() const { return index_ >> 3; }
  constexpr bool valid() const { return index_ >= 0 && index_ < 64; }

  std::string name() const {
    return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
  }

  constexpr auto operator<=>(const Square&) const = default;

 private:
  int8_t index_ = -1;
};

enum class Color : uint8_t { White, Black };

constexpr Color opponent(Color c) {
  return c == Color::White ? Color::Black : Color::White;
}

enum class PieceKind : uint8_t { Pawn, Knight, Bishop, Rook, Queen, King };

struct Piece {
  Color color;
  PieceKind kind;

  constexpr bool operator==(const Piece&) const = default;
};

constexpr char piece_char(Piece p) {
  constexpr const char* w = "PNBRQK";
  constexpr const char* b = "pnbrqk";
  return (p.color == Color::White ? w : b)[static_cast<int>(p.kind)];
}

inline std::optional<PieceKind> kind_from_letter(char c) {
  switch (c) {
    case 'P': return PieceKind::Pawn;
    case 'N': return PieceKind::Knight;
    case 'B': return PieceKind::Bishop;
    case 'R': return PieceKind::Rook;
    case 'Q': return PieceKind::Queen;
    case 'K': return PieceKind::King;
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Moves
// ---------------------------------------------------------------------------

enum class MoveKind : uint8_t {
  Normal,
  Capture,
  EnPassant,
  CastleKingside,
  CastleQueenside,
  DoublePawnPush,
};

struct Move {
  Square from;
  Square to;
  std::optional<PieceKind> promotion;
  MoveKind kind = MoveKind::Normal;

  bool is_capture() const {
    return kind == MoveKind::Capture || kind == MoveKind::EnPassant;
  }

  constexpr bool operator==(const Move&) const = default;
};

// Long algebraic form ("e2e4", "g7h8q"), for diagnostics.
inline std::string to_string(const Move& m) {
  std::string s = m.from.name() + m.to.name();
  if (m.promotion) {
    s += static_cast<char>(
        piece_char({Color::Black, *m.promotion}));  // lowercase letter
  }
  return s;
}

// ---------------------------------------------------------------------------
// Game records (produced by the PGN layer, consumed by replay)
// ---------------------------------------------------------------------------

enum class GameResult : uint8_t { WhiteWins, BlackWins, Draw, Unknown };

inline std::string_view result_token(GameResult r) {
  switch (r) {
    case GameResult::WhiteWins: return "1-0";
    case GameResult::BlackWins: return "0-1";
    case GameResult::Draw: return "1/2-1/2";
    default: return "*";
  }
}

inline std::optional<GameResult> result_from_token(std::string_view t) {
  if (t == "1-0") return GameResult::WhiteWins;
  if (t == "0-1") return GameResult::BlackWins;
  if (t == "1/2-1/2") return GameResult::Draw;
  if (t == "*") return GameResult::Unknown;
  return std::nullopt;
}

struct GameRecord {
  std::vector<std::pair<std::string, std::string>> tags;
  std::vector<std::string> moves;  // SAN tokens, annotations kept as written
  GameResult result = GameResult::Unknown;

  const std::string* tag(std::string_view name) const {
    for (const auto& [n, v] : tags) {
      if (n == name) return &v;
    }
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Board state
// ---------------------------------------------------------------------------

inline constexpr int8_t kNoTag = -1;

// Canonical order of the 32 starting squares: a1-h1, a2-h2, a7-h7, a8-h8.
// Board::initial() stamps tag i on canonical square i.
inline Square canonical_start_square(int tag) {
  static constexpr int ranks[4] = {0, 1, 6, 7};
  return Square(tag & 7, ranks[tag >> 3]);
}

class Board {
 public:
  static constexpr uint8_t kCastleWK = 1;
  static constexpr uint8_t kCastleWQ = 2;
  static constexpr uint8_t kCastleBK = 4;
  static constexpr uint8_t kCastleBQ = 8;

  static Board initial() {
    Board b;
    constexpr PieceKind back[8] = {PieceKind::Rook,   PieceKind::Knight,
                                   PieceKind::Bishop, PieceKind::Queen,
                                   PieceKind::King,   PieceKind::Bishop,
                                   PieceKind::Knight, PieceKind::Rook};
    for (int f = 0; f < 8; ++f) {
      b.set(Square(f, 0), Piece{Color::White, back[f]});
      b.set(Square(f, 1), Piece{Color::White, PieceKind::Pawn});
      b.set(Square(f, 6), Piece{Color::Black, PieceKind::Pawn});
      b.set(Square(f, 7), Piece{Color::Black, back[f]});
    }
    for (int i = 0; i < 32; ++i) {
      b.tags_[canonical_start_square(i).index()] = static_cast<int8_t>(i);
    }
    b.castling_ = kCastleWK | kCastleWQ | kCastleBK | kCastleBQ;
    return b;
  }

  std::optional<Piece> piece_at(Square s) const {
    uint8_t c = cells_[s.index()];
    if (c == 0) return std::nullopt;
    return Piece{c & 8 ? Color::Black : Color::White,
                 static_cast<PieceKind>((c & 7) - 1)};
  }

  bool empty(Square s) const { return cells_[s.index()] == 0; }

  int8_t tag_at(Square s) const { return tags_[s.index()]; }

  Color side_to_move() const { return stm_; }
  uint8_t castling_rights() const { return castling_; }
  bool can_castle(uint8_t bit) const { return castling_ & bit; }

  std::optional<Square> en_passant_target() const {
    return ep_ < 0 ? std::nullopt : std::optional<Square>(Square(ep_));
  }

  int ply_count() const { return ply_; }
  int halfmove_clock() const { return halfmove_; }

  Square king_square(Color c) const {
    uint8_t code = encode(Piece{c, PieceKind::King});
    for (int i = 0; i < 64; ++i) {
      if (cells_[i] == code) return Square(i);
    }
    return Square();  // invalid; boards built through the API always have kings
  }

  int count_pieces(Color c) const {
    int n = 0;
    for (int i = 0; i < 64; ++i) {
      if (cells_[i] != 0 && ((cells_[i] & 8) != 0) == (c == Color::Black)) ++n;
    }
    return n;
  }

  bool operator==(const Board&) const = default;

  // Mutators are package-internal; external code goes through apply_move.
  void set(Square s, Piece p, int8_t tag = kNoTag) {
    cells_[s.index()] = encode(p);
    tags_[s.index()] = tag;
  }

  void clear(Square s) {
    cells_[s.index()] = 0;
    tags_[s.index()] = kNoTag;
  }

  void set_side_to_move(Color c) { stm_ = c; }
  void set_castling_rights(uint8_t r) { castling_ = r; }
  void set_en_passant_target(std::optional<Square> s) {
    ep_ = s ? static_cast<int8_t>(s->index()) : int8_t(-1);
  }
  void set_ply_count(int p) { ply_ = p; }
  void set_halfmove_clock(int h) { halfmove_ = h; }

  uint8_t raw_cell(int i) const { return cells_[i]; }

 private:
  static constexpr uint8_t encode(Piece p) {
    return static_cast<uint8_t>(static_cast<int>(p.kind) + 1) |
           (p.color == Color::Black ? 8 : 0);
  }

  static constexpr std::array<int8_t, 64> untagged() {
    std::array<int8_t, 64> t{};
    t.fill(kNoTag);
    return t;
  }

  std::array<uint8_t, 64> cells_{};
  std::array<int8_t, 64> tags_ = untagged();
  Color stm_ = Color::White;
  uint8_t castling_ = 0;
  int8_t ep_ = -1;
  int ply_ = 0;
  int halfmove_ = 0;
};

using BoardState = Board;

inline Board initial_board() { return Board::initial(); }

// ---------------------------------------------------------------------------
// Attack detection
// ---------------------------------------------------------------------------

namespace detail {

struct Delta {
  int8_t df, dr;
};

inline constexpr Delta kKnightDeltas[8] = {{1, 2},   {2, 1},   {2, -1}, {1, -2},
                                           {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
inline constexpr Delta kKingDeltas[8] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                         {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
inline constexpr Delta kBishopDirs[4] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
inline constexpr Delta kRookDirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

inline bool on_board(int f, int r) { return f >= 0 && f < 8 && r >= 0 && r < 8; }

}  // namespace detail

// True if any piece of `by` attacks square `s` (en passant not considered).
inline bool is_square_attacked(const Board& b, Square s, Color by) {
  using namespace detail;
  const int f0 = s.file(), r0 = s.rank();

  for (const auto& d : kKnightDeltas) {
    int f = f0 + d.df, r = r0 + d.dr;
    if (on_board(f, r)) {
      auto p = b.piece_at(Square(f, r));
      if (p && p->color == by && p->kind == PieceKind::Knight) return true;
    }
  }
  for (const auto& d : kKingDeltas) {
    int f = f0 + d.df, r = r0 + d.dr;
    if (on_board(f, r)) {
      auto p = b.piece_at(Square(f, r));
      if (p && p->color == by && p->kind == PieceKind::King) return true;
    }
  }
  // A pawn of `by` attacks s from one rank behind (relative to `by`).
  const int pr = by == Color::White ? r0 - 1 : r0 + 1;
  for (int df : {-1, 1}) {
    int f = f0 + df;
    if (on_board(f, pr)) {
      auto p = b.piece_at(Square(f, pr));
      if (p && p->color == by && p->kind == PieceKind::Pawn) return true;
    }
  }
  for (const auto& d : kBishopDirs) {
    for (int f = f0 + d.df, r = r0 + d.dr; on_board(f, r); f += d.df, r += d.dr) {
      auto p = b.piece_at(Square(f, r));
      if (p) {
        if (p->color == by &&
            (p->kind == PieceKind::Bishop || p->kind == PieceKind::Queen)) {
          return true;
        }
        break;
      }
    }
  }
  for (const auto& d : kRookDirs) {
    for (int f = f0 + d.df, r = r0 + d.dr; on_board(f, r); f += d.df, r += d.dr) {
      auto p = b.piece_at(Square(f, r));
      if (p) {
        if (p->color == by &&
            (p->kind == PieceKind::Rook || p->kind == PieceKind::Queen)) {
          return true;
        }
        break;
      }
    }
  }
  return false;
}

inline bool in_check(const Board& b) {
  return is_square_attacked(b, b.king_square(b.side_to_move()),
                            opponent(b.side_to_move()));
}

// ---------------------------------------------------------------------------
// Move application
// ---------------------------------------------------------------------------

// A piece removed from the board by a capture, still carrying its tag and the
// square it actually stood on (for en passant that is not the to-square).
struct Captured {
  Piece piece;
  Square square;
  int8_t tag;
};

namespace detail {

// Applies m without legality checks. Caller guarantees pseudo-legal geometry.
inline Board apply_unchecked(const Board& b, const Move& m,
                             std::optional<Captured>* released = nullptr) {
  Board n = b;
  const Color us = b.side_to_move();
  const Piece mover = *b.piece_at(m.from);
  const int8_t tag = b.tag_at(m.from);
  bool pawn_or_capture = mover.kind == PieceKind::Pawn;

  if (released) released->reset();

  if (m.kind == MoveKind::EnPassant) {
    Square victim(m.to.file(), m.from.rank());
    if (released) {
      *released = Captured{*b.piece_at(victim), victim, b.tag_at(victim)};
    }
    n.clear(victim);
    pawn_or_capture = true;
  } else if (auto target = b.piece_at(m.to)) {
    if (released) *released = Captured{*target, m.to, b.tag_at(m.to)};
    pawn_or_capture = true;
  }

  n.clear(m.from);
  Piece placed = mover;
  if (m.promotion) placed.kind = *m.promotion;  // tag survives promotion
  n.set(m.to, placed, tag);

  if (m.kind == MoveKind::CastleKingside || m.kind == MoveKind::CastleQueenside) {
    const int rank = us == Color::White ? 0 : 7;
    const Square rook_from(m.kind == MoveKind::CastleKingside ? 7 : 0, rank);
    const Square rook_to(m.kind == MoveKind::CastleKingside ? 5 : 3, rank);
    const int8_t rook_tag = b.tag_at(rook_from);
    n.clear(rook_from);
    n.set(rook_to, Piece{us, PieceKind::Rook}, rook_tag);
  }

  // Castling rights die with king/rook moves and with captures on rook homes.
  uint8_t rights = b.castling_rights();
  auto strip = [&rights](Square s) {
    if (s == Square(4, 0)) rights &= ~(Board::kCastleWK | Board::kCastleWQ);
    if (s == Square(0, 0)) rights &= ~Board::kCastleWQ;
    if (s == Square(7, 0)) rights &= ~Board::kCastleWK;
    if (s == Square(4, 7)) rights &= ~(Board::kCastleBK | Board::kCastleBQ);
    if (s == Square(0, 7)) rights &= ~Board::kCastleBQ;
    if (s == Square(7, 7)) rights &= ~Board::kCastleBK;
  };
  strip(m.from);
  strip(m.to);
  n.set_castling_rights(rights);

  if (m.kind == MoveKind::DoublePawnPush) {
    n.set_en_passant_target(Square(m.from.file(), (m.from.rank() + m.to.rank()) / 2));
  } else {
    n.set_en_passant_target(std::nullopt);
  }

  n.set_side_to_move(opponent(us));
  n.set_ply_count(b.ply_count() + 1);
  n.set_halfmove_clock(pawn_or_capture ? 0 : b.halfmove_clock() + 1);
  return n;
}

// Pseudo-legal candidate passes iff our king is not attacked afterwards.
inline bool leaves_king_safe(const Board& b, const Move& m) {
  Board n = apply_unchecked(b, m);
  return !is_square_attacked(n, n.king_square(b.side_to_move()),
                             opponent(b.side_to_move()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Legal move generation
// ---------------------------------------------------------------------------

namespace detail {

template <typename Sink>
void emit_pawn_moves(const Board& b, Square from, Sink&& sink) {
  const Color us = b.side_to_move();
  const int fwd = us == Color::White ? 1 : -1;
  const int start_rank = us == Color::White ? 1 : 6;
  const int promo_rank = us == Color::White ? 7 : 0;
  const int f = from.file(), r = from.rank();

  auto emit = [&](Square to, MoveKind kind) {
    if (to.rank() == promo_rank) {
      for (PieceKind pk : {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop,
                           PieceKind::Knight}) {
        sink(Move{from, to, pk, kind});
      }
    } else {
      sink(Move{from, to, std::nullopt, kind});
    }
  };

  Square one(f, r + fwd);
  if (b.empty(one)) {
    emit(one, MoveKind::Normal);
    if (r == start_rank) {
      Square two(f, r + 2 * fwd);
      if (b.empty(two)) sink(Move{from, two, std::nullopt, MoveKind::DoublePawnPush});
    }
  }
  for (int df : {-1, 1}) {
    if (!on_board(f + df, r + fwd)) continue;
    Square to(f + df, r + fwd);
    auto target = b.piece_at(to);
    if (target && target->color != us) {
      emit(to, MoveKind::Capture);
    } else if (!target && b.en_passant_target() == to) {
      sink(Move{from, to, std::nullopt, MoveKind::EnPassant});
    }
  }
}

template <typename Sink>
void emit_piece_moves(const Board& b, Square from, PieceKind kind, Sink&& sink) {
  const Color us = b.side_to_move();
  auto try_square = [&](int f, int r) -> bool {  // returns "ray continues"
    if (!on_board(f, r)) return false;
    Square to(f, r);
    auto target = b.piece_at(to);
    if (!target) {
      sink(Move{from, to, std::nullopt, MoveKind::Normal});
      return true;
    }
    if (target->color != us) sink(Move{from, to, std::nullopt, MoveKind::Capture});
    return false;
  };

  const int f0 = from.file(), r0 = from.rank();
  switch (kind) {
    case PieceKind::Knight:
      for (const auto& d : kKnightDeltas) try_square(f0 + d.df, r0 + d.dr);
      break;
    case PieceKind::King:
      for (const auto& d : kKingDeltas) try_square(f0 + d.df, r0 + d.dr);
      break;
    case PieceKind::Bishop:
      for (const auto& d : kBishopDirs) {
        for (int f = f0 + d.df, r = r0 + d.dr; try_square(f, r); f += d.df, r += d.dr) {
        }
      }
      break;
    case PieceKind::Rook:
      for (const auto& d : kRookDirs) {
        for (int f = f0 + d.df, r = r0 + d.dr; try_square(f, r); f += d.df, r += d.dr) {
        }
      }
      break;
    case PieceKind::Queen:
      for (const auto& d : kBishopDirs) {
        for (int f = f0 + d.df, r = r0 + d.dr; try_square(f, r); f += d.df, r += d.dr) {
        }
      }
      for (const auto& d : kRookDirs) {
        for (int f = f0 + d.df, r = r0 + d.dr; try_square(f, r); f += d.df, r += d.dr) {
        }
      }
      break;
    case PieceKind::Pawn:
      break;  // handled by emit_pawn_moves
  }
}

template <typename Sink>
void emit_castling(const Board& b, Sink&& sink) {
  const Color us = b.side_to_move();
  const int rank = us == Color::White ? 0 : 7;
  const Square king(4, rank);
  auto kp = b.piece_at(king);
  if (!kp || kp->kind != PieceKind::King || kp->color != us) return;

  struct Side {
    uint8_t right;
    int rook_file;
    int path_files[3];  // -1 terminated; must be empty
    int transit_files[2];  // king passes through; must be unattacked (+ king sq)
    MoveKind kind;
    int king_to;
  };
  const Side sides[2] = {
      {us == Color::White ? Board::kCastleWK : Board::kCastleBK,
       7,
       {5, 6, -1},
       {5, 6},
       MoveKind::CastleKingside,
       6},
      {us == Color::White ? Board::kCastleWQ : Board::kCastleBQ,
       0,
       {1, 2, 3},
       {3, 2},
       MoveKind::CastleQueenside,
       2},
  };
  for (const auto& s : sides) {
    if (!b.can_castle(s.right)) continue;
    auto rook = b.piece_at(Square(s.rook_file, rank));
    if (!rook || rook->kind != PieceKind::Rook || rook->color != us) continue;
    bool clear = true;
    for (int pf : s.path_files) {
      if (pf >= 0 && !b.empty(Square(pf, rank))) clear = false;
    }
    if (!clear) continue;
    if (is_square_attacked(b, king, opponent(us))) continue;
    bool safe = true;
    for (int tf : s.transit_files) {
      if (is_square_attacked(b, Square(tf, rank), opponent(us))) safe = false;
    }
    if (!safe) continue;
    sink(Move{king, Square(s.king_to, rank), std::nullopt, s.kind});
  }
}

template <typename Sink>
void for_each_pseudo_move(const Board& b, Sink&& sink) {
  const Color us = b.side_to_move();
  for (int i = 0; i < 64; ++i) {
    Square from(i);
    auto p = b.piece_at(from);
    if (!p || p->color != us) continue;
    if (p->kind == PieceKind::Pawn) {
      emit_pawn_moves(b, from, sink);
    } else {
      emit_piece_moves(b, from, p->kind, sink);
    }
  }
  emit_castling(b, sink);
}

}  // namespace detail

// All moves legal under FIDE rules for the side to move. Castling legality
// (rights, clear path, no transit through check) is enforced at generation;
// everything else is filtered by the king-safety check.
inline std::vector<Move> legal_moves(const Board& b) {
  std::vector<Move> out;
  out.reserve(48);
  detail::for_each_pseudo_move(b, [&](const Move& m) {
    if (m.kind == MoveKind::CastleKingside || m.kind == MoveKind::CastleQueenside) {
      out.push_back(m);  // transit checks already cover king safety
    } else if (detail::leaves_king_safe(b, m)) {
      out.push_back(m);
    }
  });
  return out;
}

inline bool has_legal_move(const Board& b) {
  bool found = false;
  detail::for_each_pseudo_move(b, [&](const Move& m) {
    if (found) return;
    if (m.kind == MoveKind::CastleKingside || m.kind == MoveKind::CastleQueenside ||
        detail::leaves_king_safe(b, m)) {
      found = true;
    }
  });
  return found;
}

inline bool is_checkmate(const Board& b) {
  return in_check(b) && !has_legal_move(b);
}

// Checked application: rejects anything not in legal_moves(b).
inline Board apply_move(const Board& b, const Move& m,
                        std::optional<Captured>* released = nullptr) {
  auto mover = m.from.valid() ? b.piece_at(m.from) : std::nullopt;
  if (!mover || mover->color != b.side_to_move() || !m.to.valid()) {
    throw IllegalMove("move " + to_string(m) + " does not fit the position");
  }
  for (const Move& lm : legal_moves(b)) {
    if (lm == m) return detail::apply_unchecked(b, m, released);
  }
  throw IllegalMove("move " + to_string(m) + " is not legal here");
}

// ---------------------------------------------------------------------------
// SAN
// ---------------------------------------------------------------------------

namespace detail {

struct SanParts {
  PieceKind piece = PieceKind::Pawn;
  int from_file = -1;  // disambiguation hints
  int from_rank = -1;
  bool capture = false;
  Square to;
  std::optional<PieceKind> promotion;
  int castle = 0;  // 1 kingside, 2 queenside
};

// Lexes one SAN token. Accepts and ignores trailing check marks and
// annotation glyphs (+ # ! ?), which Lichess exports carry routinely.
inline SanParts lex_san(std::string_view san) {
  std::string_view s = san;
  while (!s.empty() && (s.back() == '+' || s.back() == '#' || s.back() == '!' ||
                        s.back() == '?')) {
    s.remove_suffix(1);
  }
  if (s.empty()) throw MalformedSan("empty SAN token '" + std::string(san) + "'");

  SanParts p;
  if (s == "O-O" || s == "0-0") {
    p.castle = 1;
    return p;
  }
  if (s == "O-O-O" || s == "0-0-0") {
    p.castle = 2;
    return p;
  }

  if (auto k = kind_from_letter(s.front()); k && *k != PieceKind::Pawn) {
    p.piece = *k;
    s.remove_prefix(1);
  }

  if (s.size() >= 2 && s[s.size() - 2] == '=') {
    auto k = kind_from_letter(s.back());
    if (!k || *k == PieceKind::Pawn || *k == PieceKind::King) {
      throw MalformedSan("bad promotion in '" + std::string(san) + "'");
    }
    p.promotion = *k;
    s.remove_suffix(2);
  }

  if (s.size() < 2 || s[s.size() - 2] < 'a' || s[s.size() - 2] > 'h' ||
      s.back() < '1' || s.back() > '8') {
    throw MalformedSan("no destination square in '" + std::string(san) + "'");
  }
  p.to = Square(s[s.size() - 2] - 'a', s.back() - '1');
  s.remove_suffix(2);

  if (!s.empty() && s.back() == 'x') {
    p.capture = true;
    s.remove_suffix(1);
  }
  if (!s.empty() && s.back() >= '1' && s.back() <= '8') {
    p.from_rank = s.back() - '1';
    s.remove_suffix(1);
  }
  if (!s.empty() && s.back() >= 'a' && s.back() <= 'h') {
    p.from_file = s.back() - 'a';
    s.remove_suffix(1);
  }
  if (!s.empty()) throw MalformedSan("unexpected '" + std::string(san) + "'");
  return p;
}

inline bool geometry_reaches(const Board& b, PieceKind kind, Square from,
                             Square to) {
  const int df = to.file() - from.file();
  const int dr = to.rank() - from.rank();
  const int adf = df < 0 ? -df : df;
  const int adr = dr < 0 ? -dr : dr;
  switch (kind) {
    case PieceKind::Knight:
      return (adf == 1 && adr == 2) || (adf == 2 && adr == 1);
    case PieceKind::King:
      return adf <= 1 && adr <= 1 && (adf | adr);
    case PieceKind::Bishop:
      if (adf != adr || adf == 0) return false;
      break;
    case PieceKind::Rook:
      if (df != 0 && dr != 0) return false;
      break;
    case PieceKind::Queen:
      if (!(adf == adr || df == 0 || dr == 0) || (adf | adr) == 0) return false;
      break;
    case PieceKind::Pawn:
      return false;  // pawns resolved separately
  }
  const int sf = (df > 0) - (df < 0);
  const int sr = (dr > 0) - (dr < 0);
  for (int f = from.file() + sf, r = from.rank() + sr;
       f != to.file() || r != to.rank(); f += sf, r += sr) {
    if (!b.empty(Square(f, r))) return false;
  }
  return true;
}

}  // namespace detail

// Resolves a SAN token against a position to the unique matching legal move.
// Disambiguation hints narrow candidates; over-disambiguated but unique
// tokens are accepted (the Lichess dialect produces them).
inline Move parse_san(const Board& b, std::string_view san) {
  using namespace detail;
  SanParts p = lex_san(san);
  const Color us = b.side_to_move();

  if (p.castle) {
    Move want;
    bool found = false;
    emit_castling(b, [&](const Move& m) {
      if ((p.castle == 1 && m.kind == MoveKind::CastleKingside) ||
          (p.castle == 2 && m.kind == MoveKind::CastleQueenside)) {
        want = m;
        found = true;
      }
    });
    if (!found) {
      throw IllegalSan("castling unavailable: '" + std::string(san) + "'");
    }
    return want;
  }

  std::vector<Move> matches;
  auto consider = [&](const Move& m) {
    if (detail::leaves_king_safe(b, m)) matches.push_back(m);
  };

  if (p.piece == PieceKind::Pawn) {
    const int fwd = us == Color::White ? 1 : -1;
    const int promo_rank = us == Color::White ? 7 : 0;
    if (static_cast<bool>(p.promotion) != (p.to.rank() == promo_rank)) {
      throw IllegalSan("promotion piece required exactly on the last rank: '" +
                       std::string(san) + "'");
    }
    if (p.capture) {
      if (p.from_file < 0) {
        throw MalformedSan("pawn capture needs a file: '" + std::string(san) + "'");
      }
      if (p.from_file - p.to.file() != 1 && p.to.file() - p.from_file != 1) {
        throw IllegalSan("pawn capture file mismatch: '" + std::string(san) + "'");
      }
      const int fr = p.to.rank() - fwd;
      if (fr < 0 || fr > 7 || (p.from_rank >= 0 && p.from_rank != fr)) {
        throw IllegalSan("no pawn can make '" + std::string(san) + "'");
      }
      Square from(p.from_file, fr);
      auto mover = b.piece_at(from);
      if (mover && mover->color == us && mover->kind == PieceKind::Pawn) {
        auto target = b.piece_at(p.to);
        if (target && target->color != us) {
          consider(Move{from, p.to, p.promotion, MoveKind::Capture});
        } else if (!target && b.en_passant_target() == p.to) {
          consider(Move{from, p.to, std::nullopt, MoveKind::EnPassant});
        }
      }
    } else {
      if (p.from_file >= 0 && p.from_file != p.to.file()) {
        throw IllegalSan("pawn push stays on its file: '" + std::string(san) + "'");
      }
      if (!b.empty(p.to)) {
        throw IllegalSan("destination occupied: '" + std::string(san) + "'");
      }
      const int r1 = p.to.rank() - fwd;
      const int start_rank = us == Color::White ? 1 : 6;
      if (r1 >= 0 && r1 <= 7) {
        Square one(p.to.file(), r1);
        auto mover = b.piece_at(one);
        if (mover && mover->color == us && mover->kind == PieceKind::Pawn &&
            (p.from_rank < 0 || p.from_rank == r1)) {
          consider(Move{one, p.to, p.promotion, MoveKind::Normal});
        } else if (!mover && p.to.rank() - fwd - fwd == start_rank) {
          Square two(p.to.file(), start_rank);
          auto dp = b.piece_at(two);
          if (dp && dp->color == us && dp->kind == PieceKind::Pawn &&
              (p.from_rank < 0 || p.from_rank == start_rank)) {
            consider(Move{two, p.to, std::nullopt, MoveKind::DoublePawnPush});
          }
        }
      }
    }
  } else {
    auto dest = b.piece_at(p.to);
    if (dest && dest->color == us) {
      throw IllegalSan("destination holds own piece: '" + std::string(san) + "'");
    }
    if (p.capture && !dest) {
      throw IllegalSan("capture marker with empty destination: '" +
                       std::string(san) + "'");
    }
    const MoveKind mk = dest ? MoveKind::Capture : MoveKind::Normal;
    for (int i = 0; i < 64; ++i) {
      Square from(i);
      if (p.from_file >= 0 && from.file() != p.from_file) continue;
      if (p.from_rank >= 0 && from.rank() != p.from_rank) continue;
      auto mover = b.piece_at(from);
      if (!mover || mover->color != us || mover->kind != p.piece) continue;
      if (!detail::geometry_reaches(b, p.piece, from, p.to)) continue;
      consider(Move{from, p.to, std::nullopt, mk});
    }
  }

  if (matches.empty()) {
    throw IllegalSan("no legal move matches '" + std::string(san) + "'");
  }
  if (matches.size() > 1) {
    throw AmbiguousSan("'" + std::string(san) + "' matches " +
                       std::to_string(matches.size()) + " moves");
  }
  return matches.front();
}

// Renders a legal move in minimal-disambiguation SAN, with '+'/'#' suffix.
inline std::string to_san(const Board& b, const Move& m) {
  std::string san;
  if (m.kind == MoveKind::CastleKingside) {
    san = "O-O";
  } else if (m.kind == MoveKind::CastleQueenside) {
    san = "O-O-O";
  } else {
    const Piece mover = *b.piece_at(m.from);
    if (mover.kind == PieceKind::Pawn) {
      if (m.is_capture()) {
        san += static_cast<char>('a' + m.from.file());
        san += 'x';
      }
      san += m.to.name();
      if (m.promotion) {
        san += '=';
        san += piece_char({Color::White, *m.promotion});
      }
    } else {
      san += piece_char({Color::White, mover.kind});
      // Disambiguate among same-kind pieces that could also legally reach to.
      bool clash = false, file_clash = false, rank_clash = false;
      for (int i = 0; i < 64; ++i) {
        Square other(i);
        if (other == m.from) continue;
        auto p = b.piece_at(other);
        if (!p || p->color != mover.color || p->kind != mover.kind) continue;
        if (!detail::geometry_reaches(b, mover.kind, other, m.to)) continue;
        MoveKind mk = b.piece_at(m.to) ? MoveKind::Capture : MoveKind::Normal;
        if (!detail::leaves_king_safe(b, Move{other, m.to, std::nullopt, mk})) {
          continue;
        }
        clash = true;
        if (other.file() == m.from.file()) file_clash = true;
        if (other.rank() == m.from.rank()) rank_clash = true;
      }
      if (clash) {
        if (!file_clash) {
          san += static_cast<char>('a' + m.from.file());
        } else if (!rank_clash) {
          san += static_cast<char>('1' + m.from.rank());
        } else {
          san += m.from.name();
        }
      }
      if (m.is_capture()) san += 'x';
      san += m.to.name();
    }
  }
  Board after = detail::apply_unchecked(b, m);
  if (in_check(after)) san += has_legal_move(after) ? '+' : '#';
  return san;
}

// ---------------------------------------------------------------------------
// FEN
// ---------------------------------------------------------------------------

inline std::string to_fen(const Board& b) {
  std::string fen;
  for (int r = 7; r >= 0; --r) {
    int run = 0;
    for (int f = 0; f < 8; ++f) {
      auto p = b.piece_at(Square(f, r));
      if (!p) {
        ++run;
        continue;
      }
      if (run) {
        fen += static_cast<char>('0' + run);
        run = 0;
      }
      fen += piece_char(*p);
    }
    if (run) fen += static_cast<char>('0' + run);
    if (r) fen += '/';
  }
  fen += b.side_to_move() == Color::White ? " w " : " b ";
  if (b.castling_rights()) {
    if (b.can_castle(Board::kCastleWK)) fen += 'K';
    if (b.can_castle(Board::kCastleWQ)) fen += 'Q';
    if (b.can_castle(Board::kCastleBK)) fen += 'k';
    if (b.can_castle(Board::kCastleBQ)) fen += 'q';
  } else {
    fen += '-';
  }
  fen += ' ';
  if (auto ep = b.en_passant_target()) {
    fen += ep->name();
  } else {
    fen += '-';
  }
  fen += ' ';
  fen += std::to_string(b.halfmove_clock());
  fen += ' ';
  fen += std::to_string(b.ply_count() / 2 + 1);
  return fen;
}

// Debugging aid; tags are not representable in FEN and come back unset.
inline Board board_from_fen(std::string_view fen) {
  Board b;
  size_t i = 0;
  auto need = [&](bool cond, const char* msg) {
    if (!cond) throw ParseError(0, std::string("FEN: ") + msg);
  };
  int r = 7, f = 0;
  for (; i < fen.size() && fen[i] != ' '; ++i) {
    char c = fen[i];
    if (c == '/') {
      need(f == 8, "short rank");
      --r;
      f = 0;
      need(r >= 0, "too many ranks");
    } else if (c >= '1' && c <= '8') {
      f += c - '0';
      need(f <= 8, "rank overflow");
    } else {
      need(f < 8, "rank overflow");
      Color col = std::isupper(static_cast<unsigned char>(c)) ? Color::White
                                                              : Color::Black;
      auto k = kind_from_letter(
          static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      need(k.has_value(), "bad piece letter");
      b.set(Square(f, r), Piece{col, *k});
      ++f;
    }
  }
  need(r == 0 && f == 8, "wrong rank count");
  auto next_field = [&]() -> std::string_view {
    need(i < fen.size() && fen[i] == ' ', "missing field");
    ++i;
    size_t start = i;
    while (i < fen.size() && fen[i] != ' ') ++i;
    return fen.substr(start, i - start);
  };
  auto stm = next_field();
  need(stm == "w" || stm == "b", "bad side to move");
  b.set_side_to_move(stm == "w" ? Color::White : Color::Black);
  auto castle = next_field();
  uint8_t rights = 0;
  if (castle != "-") {
    for (char c : castle) {
      switch (c) {
        case 'K': rights |= Board::kCastleWK; break;
        case 'Q': rights |= Board::kCastleWQ; break;
        case 'k': rights |= Board::kCastleBK; break;
        case 'q': rights |= Board::kCastleBQ; break;
        default: need(false, "bad castling field");
      }
    }
  }
  b.set_castling_rights(rights);
  auto ep = next_field();
  if (ep != "-") b.set_en_passant_target(Square::from_name(ep));
  if (i < fen.size()) {
    auto half = next_field();
    b.set_halfmove_clock(std::stoi(std::string(half)));
    auto full = next_field();
    int fullmove = std::stoi(std::string(full));
    b.set_ply_count((fullmove - 1) * 2 +
                    (b.side_to_move() == Color::Black ? 1 : 0));
  }
  return b;
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

struct TraceEntry {
  int ply;  // 1-based ply of this move
  Move move;
  std::optional<Captured> captured;
};

struct ReplayResult {
  Board final;
  std::vector<TraceEntry> trace;
};

// Replays a parsed game from the starting position. A token suffixed '#'
// must deliver mate; divergence means the record and the rules disagree,
// which is always a bug worth surfacing.
inline ReplayResult replay_game(const GameRecord& record) {
  ReplayResult result{Board::initial(), {}};
  result.trace.reserve(record.moves.size());
  for (size_t idx = 0; idx < record.moves.size(); ++idx) {
    const std::string& san = record.moves[idx];
    try {
      Move m = parse_san(result.final, san);
      std::optional<Captured> captured;
      result.final = detail::apply_unchecked(result.final, m, &captured);
      result.trace.push_back(
          TraceEntry{static_cast<int>(idx) + 1, m, captured});
      if (san.find('#') != std::string::npos && !is_checkmate(result.final)) {
        throw IllegalSan("'" + san + "' claims mate but position is not mate");
      }
    } catch (const ReplayError&) {
      throw;
    } catch (const Error& e) {
      throw ReplayError(idx + 1, e.what());
    }
  }
  return result;
}

}  // namespace chessog
