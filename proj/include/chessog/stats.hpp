// Final-position statistics over game corpora: per-piece placement heatmaps,
// concentration and entropy summaries, and text/CSV/SVG renderings. The
// accumulator is a plain bag of integer counts, so merging is associative and
// commutative and any map-reduce partitioning of a corpus lands on identical
// results.
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "chessog/chess.hpp"
#include "chessog/errors.hpp"

namespace chessog {

struct HeatmapAccumulator {
  // counts[color][kind][square]: games in which this piece stood on this
  // square in the final position (at most one such piece fits per square,
  // so this doubles as the occurrence count).
  std::array<std::array<std::array<uint64_t, 64>, 6>, 2> counts{};
  uint64_t games = 0;
  uint64_t ply_sum = 0;
  uint64_t white_wins = 0;
  uint64_t black_wins = 0;
  uint64_t draws = 0;
  uint64_t unknown_results = 0;

  uint64_t count(Color c, PieceKind k, Square s) const {
    return counts[static_cast<int>(c)][static_cast<int>(k)][s.index()];
  }

  uint64_t total(Color c, PieceKind k) const {
    uint64_t sum = 0;
    for (uint64_t n : counts[static_cast<int>(c)][static_cast<int>(k)]) sum += n;
    return sum;
  }

  bool operator==(const HeatmapAccumulator&) const = default;
};

inline HeatmapAccumulator& accumulate(HeatmapAccumulator& acc,
                                      const Board& final_position,
                                      GameResult result, int plies) {
  for (int i = 0; i < 64; ++i) {
    if (auto p = final_position.piece_at(Square(i))) {
      acc.counts[static_cast<int>(p->color)][static_cast<int>(p->kind)][i]++;
    }
  }
  acc.games++;
  acc.ply_sum += static_cast<uint64_t>(plies);
  switch (result) {
    case GameResult::WhiteWins: acc.white_wins++; break;
    case GameResult::BlackWins: acc.black_wins++; break;
    case GameResult::Draw: acc.draws++; break;
    default: acc.unknown_results++; break;
  }
  return acc;
}

inline HeatmapAccumulator merge(const HeatmapAccumulator& a,
                                const HeatmapAccumulator& b) {
  HeatmapAccumulator out = a;
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < 6; ++k) {
      for (int s = 0; s < 64; ++s) out.counts[c][k][s] += b.counts[c][k][s];
    }
  }
  out.games += b.games;
  out.ply_sum += b.ply_sum;
  out.white_wins += b.white_wins;
  out.black_wins += b.black_wins;
  out.draws += b.draws;
  out.unknown_results += b.unknown_results;
  return out;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

enum class Normalization { PerOccurrence, PerGame };

struct PieceSummary {
  Color color;
  PieceKind kind;
  uint64_t occurrences = 0;
  Square max_square;
  double max_share = 0;      // percent, under the chosen normalization
  double entropy_bits = 0;   // of the final-placement distribution, <= 6
  Normalization normalization = Normalization::PerOccurrence;
};

struct CorpusSummary {
  uint64_t games = 0;
  double mean_plies = 0;
  double mean_moves = 0;
  double white_win_share = 0;  // percent
  double black_win_share = 0;
  double draw_share = 0;
  double unknown_share = 0;
};

struct SummaryReport {
  std::vector<PieceSummary> pieces;  // kind-major: K,Q,B,N,R,P x white,black
  CorpusSummary corpus;
};

inline constexpr PieceKind kSummaryKindOrder[6] = {
    PieceKind::King,   PieceKind::Queen, PieceKind::Bishop,
    PieceKind::Knight, PieceKind::Rook,  PieceKind::Pawn};

inline SummaryReport summarize(const HeatmapAccumulator& acc,
                               Normalization normalization) {
  if (acc.games == 0) throw EmptyCorpus("no games accumulated");
  SummaryReport report;
  for (PieceKind kind : kSummaryKindOrder) {
    for (Color color : {Color::White, Color::Black}) {
      PieceSummary s;
      s.color = color;
      s.kind = kind;
      s.normalization = normalization;
      s.occurrences = acc.total(color, kind);
      uint64_t best = 0;
      for (int i = 0; i < 64; ++i) {
        uint64_t n = acc.count(color, kind, Square(i));
        if (n > best) {
          best = n;
          s.max_square = Square(i);
        }
      }
      const double denom = normalization == Normalization::PerOccurrence
                               ? static_cast<double>(s.occurrences)
                               : static_cast<double>(acc.games);
      s.max_share = denom > 0 ? 100.0 * best / denom : 0.0;
      // Entropy of the placement distribution. Both normalizations induce
      // share vectors proportional to the counts, so this is the same number
      // either way.
      if (s.occurrences > 0) {
        double h = 0;
        for (int i = 0; i < 64; ++i) {
          uint64_t n = acc.count(color, kind, Square(i));
          if (n == 0) continue;
          double p = static_cast<double>(n) / s.occurrences;
          h -= p * std::log2(p);
        }
        s.entropy_bits = h;
      }
      report.pieces.push_back(s);
    }
  }
  report.corpus.games = acc.games;
  report.corpus.mean_plies = static_cast<double>(acc.ply_sum) / acc.games;
  report.corpus.mean_moves = report.corpus.mean_plies / 2.0;
  report.corpus.white_win_share = 100.0 * acc.white_wins / acc.games;
  report.corpus.black_win_share = 100.0 * acc.black_wins / acc.games;
  report.corpus.draw_share = 100.0 * acc.draws / acc.games;
  report.corpus.unknown_share = 100.0 * acc.unknown_results / acc.games;
  return report;
}

// ---------------------------------------------------------------------------
// Piece naming
// ---------------------------------------------------------------------------

inline std::string_view kind_name(PieceKind k) {
  switch (k) {
    case PieceKind::King: return "king";
    case PieceKind::Queen: return "queen";
    case PieceKind::Bishop: return "bishop";
    case PieceKind::Knight: return "knight";
    case PieceKind::Rook: return "rook";
    default: return "pawn";
  }
}

inline std::string piece_label(Color c, PieceKind k) {
  return std::string(c == Color::White ? "white" : "black") + "_" +
         std::string(kind_name(k));
}

// Accepts "white-king", "white_king" or "White King"-ish tokens.
inline std::pair<Color, PieceKind> piece_from_token(std::string_view token) {
  std::string t;
  for (char c : token) {
    t += c == '-' || c == ' ' ? '_' : static_cast<char>(std::tolower(
                                          static_cast<unsigned char>(c)));
  }
  for (Color c : {Color::White, Color::Black}) {
    for (PieceKind k :
         {PieceKind::King, PieceKind::Queen, PieceKind::Bishop,
          PieceKind::Knight, PieceKind::Rook, PieceKind::Pawn}) {
      if (t == piece_label(c, k)) return {c, k};
    }
  }
  throw UnknownPiece("unknown piece '" + std::string(token) + "'");
}

// ---------------------------------------------------------------------------
// Heatmap rendering
// ---------------------------------------------------------------------------

enum class HeatmapFormat { TextGrid, Csv, Svg };

namespace detail {

struct HeatmapShares {
  std::array<uint64_t, 64> counts;
  std::array<double, 64> per_occurrence;  // percent
  std::array<double, 64> per_game;        // percent
  double max_per_occurrence = 0;
};

inline HeatmapShares heatmap_shares(const HeatmapAccumulator& acc, Color color,
                                    PieceKind kind) {
  HeatmapShares s{};
  const uint64_t total = acc.total(color, kind);
  for (int i = 0; i < 64; ++i) {
    s.counts[i] = acc.count(color, kind, Square(i));
    s.per_occurrence[i] = total ? 100.0 * s.counts[i] / total : 0.0;
    s.per_game[i] = acc.games ? 100.0 * s.counts[i] / acc.games : 0.0;
    s.max_per_occurrence = std::max(s.max_per_occurrence, s.per_occurrence[i]);
  }
  return s;
}

inline std::string format2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

// Renders one piece's final-position heatmap.
//   text-grid: 8x8 per-occurrence percentages, rank 8 on top
//   csv:       square,count,share_per_occurrence,share_per_game
//   svg:       8x8 board, monotone blue scale normalized to this heatmap's max
inline std::string render_heatmap(const HeatmapAccumulator& acc, Color color,
                                  PieceKind kind, HeatmapFormat format) {
  const detail::HeatmapShares s = detail::heatmap_shares(acc, color, kind);
  std::string out;
  switch (format) {
    case HeatmapFormat::TextGrid: {
      out += "# " + piece_label(color, kind) +
             ", per-occurrence shares [%], games=" + std::to_string(acc.games) +
             "\n";
      for (int r = 7; r >= 0; --r) {
        out += static_cast<char>('1' + r);
        for (int f = 0; f < 8; ++f) {
          std::string cell = detail::format2(s.per_occurrence[r * 8 + f]);
          out += std::string(8 - cell.size(), ' ') + cell;
        }
        out += '\n';
      }
      out += " ";
      for (int f = 0; f < 8; ++f) {
        out += std::string(7, ' ');
        out += static_cast<char>('a' + f);
      }
      out += '\n';
      break;
    }
    case HeatmapFormat::Csv: {
      out += "square,count,share_per_occurrence,share_per_game\n";
      for (int i = 0; i < 64; ++i) {
        out += Square(i).name() + "," + std::to_string(s.counts[i]) + "," +
               detail::format2(s.per_occurrence[i]) + "," +
               detail::format2(s.per_game[i]) + "\n";
      }
      break;
    }
    case HeatmapFormat::Svg: {
      const int cell = 44, margin = 20;
      const int size = 8 * cell + 2 * margin;
      out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
             std::to_string(size) + "\" height=\"" + std::to_string(size + 24) +
             "\" data-piece=\"" + piece_label(color, kind) +
             "\" data-max-share=\"" + detail::format2(s.max_per_occurrence) +
             "\">\n";
      out += "<text x=\"" + std::to_string(margin) + "\" y=\"16\">" +
             piece_label(color, kind) + " (max " +
             detail::format2(s.max_per_occurrence) + "%)</text>\n";
      for (int r = 7; r >= 0; --r) {
        for (int f = 0; f < 8; ++f) {
          const double share = s.per_occurrence[r * 8 + f];
          const double unit =
              s.max_per_occurrence > 0 ? share / s.max_per_occurrence : 0.0;
          // white -> dark blue, scaled to this heatmap alone
          const int red = static_cast<int>(255 - unit * (255 - 8));
          const int green = static_cast<int>(255 - unit * (255 - 48));
          const int blue = static_cast<int>(255 - unit * (255 - 107));
          const int x = margin + f * cell;
          const int y = 24 + margin + (7 - r) * cell;
          out += "<rect x=\"" + std::to_string(x) + "\" y=\"" +
                 std::to_string(y) + "\" width=\"" + std::to_string(cell) +
                 "\" height=\"" + std::to_string(cell) + "\" fill=\"rgb(" +
                 std::to_string(red) + "," + std::to_string(green) + "," +
                 std::to_string(blue) + ")\" stroke=\"#999\"><title>" +
                 Square(f, r).name() + ": " + detail::format2(share) +
                 "%</title></rect>\n";
        }
      }
      out += "</svg>\n";
      break;
    }
  }
  return out;
}

// Table-style summary, both normalizations side by side. The max square is
// the argmax of the raw counts, which both normalizations share.
inline std::string summary_csv(const HeatmapAccumulator& acc) {
  SummaryReport per_occ = summarize(acc, Normalization::PerOccurrence);
  SummaryReport per_game = summarize(acc, Normalization::PerGame);
  std::string out =
      "piece,color,occurrences,max_square,max_share_per_occurrence,"
      "max_share_per_game,entropy_bits\n";
  for (std::size_t i = 0; i < per_occ.pieces.size(); ++i) {
    const PieceSummary& a = per_occ.pieces[i];
    const PieceSummary& b = per_game.pieces[i];
    char entropy[32];
    std::snprintf(entropy, sizeof(entropy), "%.3f", a.entropy_bits);
    out += std::string(kind_name(a.kind)) + "," +
           (a.color == Color::White ? "white" : "black") + "," +
           std::to_string(a.occurrences) + "," +
           (a.occurrences ? a.max_square.name() : std::string("-")) + "," +
           detail::format2(a.max_share) + "," + detail::format2(b.max_share) +
           "," + entropy + "\n";
  }
  return out;
}

}  // namespace chessog
