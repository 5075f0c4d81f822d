// Mechanical demonstrations of the scheme's flaws: collision enumeration for
// the faithful mixing rule, exact ambiguity statistics, known-plaintext key
// recovery, seeded chi-square evidence for the one-time-pad observation, and
// weak-game scoring. Everything here is deterministic given (inputs, seed).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "chessog/cipher.hpp"
#include "chessog/errors.hpp"

namespace chessog {

// Rejection-sampled bounded draw. mt19937_64 output is pinned by the
// standard, so results are identical across platforms and library vendors
// (std::uniform_int_distribution is not).
inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

// ---------------------------------------------------------------------------
// Collision enumeration (faithful variant)
// ---------------------------------------------------------------------------

struct CollisionWitness {
  int key;
  int x1, x2;  // x1 < x2, both in 1..71
  int mixed;

  bool operator==(const CollisionWitness&) const = default;
};

// All (key, x1, x2) with key_mix(x1)=key_mix(x2) under Faithful, brute-forced
// over x1 < x2 and keys in [key_lo, key_hi], ordered by (key, x1, x2).
inline std::vector<CollisionWitness> find_collisions(int key_lo, int key_hi) {
  detail::check_range(key_lo, 0, 255, "key range low");
  detail::check_range(key_hi, key_lo, 255, "key range high");
  std::vector<CollisionWitness> out;
  for (int key = key_lo; key <= key_hi; ++key) {
    for (int x1 = 1; x1 <= 71; ++x1) {
      const int m1 = (x1 ^ key) % 71;
      for (int x2 = x1 + 1; x2 <= 71; ++x2) {
        if ((x2 ^ key) % 71 == m1) {
          out.push_back(CollisionWitness{key, x1, x2, m1});
        }
      }
    }
  }
  return out;
}

struct AmbiguityStats {
  long long ambiguous_pairs = 0;  // (x, key) pairs whose mixed code has >1 preimage
  long long total_pairs = 0;
  int keys_with_collision = 0;
  int total_keys = 0;

  double ambiguous_pair_fraction() const {
    return total_pairs ? static_cast<double>(ambiguous_pairs) / total_pairs : 0.0;
  }
  double colliding_key_fraction() const {
    return total_keys ? static_cast<double>(keys_with_collision) / total_keys : 0.0;
  }
};

inline AmbiguityStats ambiguity_rate(int key_lo, int key_hi) {
  detail::check_range(key_lo, 0, 255, "key range low");
  detail::check_range(key_hi, key_lo, 255, "key range high");
  AmbiguityStats stats;
  stats.total_keys = key_hi - key_lo + 1;
  stats.total_pairs = static_cast<long long>(stats.total_keys) * 71;
  for (int key = key_lo; key <= key_hi; ++key) {
    std::array<int, 71> preimages{};
    for (int x = 1; x <= 71; ++x) preimages[(x ^ key) % 71]++;
    bool collides = false;
    for (int x = 1; x <= 71; ++x) {
      if (preimages[(x ^ key) % 71] > 1) {
        ++stats.ambiguous_pairs;
        collides = true;
      }
    }
    if (collides) ++stats.keys_with_collision;
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Known-plaintext attack
// ---------------------------------------------------------------------------

struct PositionRecovery {
  int position = 0;  // 1..32
  Square origin;     // its starting square
  bool observed = false;        // mixed code available from the ciphertext
  std::vector<int> candidates;  // keys consistent with (code, mixed), ascending

  bool unique() const { return candidates.size() == 1; }
};

struct KeyRecoveryReport {
  Variant variant = Variant::Faithful;
  bool survivors_only = false;
  std::array<PositionRecovery, 32> positions;

  int uniquely_recovered() const {
    int n = 0;
    for (const auto& p : positions) n += p.unique();
    return n;
  }
  double coverage() const { return uniquely_recovered() / 32.0; }
};

namespace detail {

// Observation map: position -> mixed code, via game provenance. With
// survivors_only the capture log is withheld and captured positions stay
// unobserved, mirroring an attacker who sees only the final board.
inline void observe_mixed_codes(const Ciphertext& ct, const GameRecord& game,
                                bool survivors_only,
                                std::array<int, 32>& mixed,
                                std::array<bool, 32>& observed) {
  ReplayResult replay = replay_game(game);
  observed.fill(false);

  for (const SurvivorEntry& s : ct.survivors) {
    if (!s.square.valid() || replay.final.empty(s.square)) {
      throw GameMismatch("no piece on survivor square " + s.square.name());
    }
    int tag = replay.final.tag_at(s.square);
    if (tag < 0 || observed[tag]) {
      throw GameMismatch("bad survivor provenance at " + s.square.name());
    }
    observed[tag] = true;
    mixed[tag] = s.code;
  }
  if (survivors_only) return;

  std::size_t log_idx = 0;
  for (const TraceEntry& t : replay.trace) {
    if (!t.captured) continue;
    if (log_idx >= ct.capture_log.size()) {
      throw GameMismatch("capture log shorter than the game's captures");
    }
    const CaptureLogEntry& e = ct.capture_log[log_idx++];
    int tag = t.captured->tag;
    if (e.ply != t.ply || e.origin != canonical_start_square(tag) ||
        observed[tag]) {
      throw GameMismatch("capture log does not match the game at ply " +
                         std::to_string(t.ply));
    }
    observed[tag] = true;
    mixed[tag] = e.code;
  }
  if (log_idx != ct.capture_log.size()) {
    throw GameMismatch("capture log longer than the game's captures");
  }
}

}  // namespace detail

// Recovers Key 1 from one known (plaintext, ciphertext) pair. Per position
// the candidate set is every key consistent with (code, mixed):
//   otp64    -- the single key code XOR mixed
//   repaired -- the key's residue class mod 71 inside [0,255] (three values)
//   faithful -- every key whose XOR-mod matches; the pair constrains but
//               rarely pins the key
inline KeyRecoveryReport known_plaintext_attack(
    std::string_view plaintext, const Ciphertext& ct, const GameRecord& game,
    Variant variant, const Alphabet& alphabet = Alphabet::standard(),
    bool survivors_only = false) {
  if (ct.variant != variant) {
    throw PairMismatch("ciphertext variant does not match");
  }
  const std::array<int, 32> codes =
      detail::block_codes(plaintext, alphabet, variant);
  std::array<int, 32> mixed{};
  std::array<bool, 32> observed{};
  detail::observe_mixed_codes(ct, game, survivors_only, mixed, observed);

  const VariantDomain d = domain_of(variant);
  KeyRecoveryReport report;
  report.variant = variant;
  report.survivors_only = survivors_only;
  for (int i = 0; i < 32; ++i) {
    PositionRecovery& p = report.positions[i];
    p.position = i + 1;
    p.origin = canonical_start_square(i);
    p.observed = observed[i];
    if (!p.observed) continue;
    for (int k = d.key_min; k <= d.key_max; ++k) {
      if (key_mix(codes[i], k, variant) == mixed[i]) p.candidates.push_back(k);
    }
    if (p.candidates.empty()) {
      throw PairMismatch("position " + std::to_string(i + 1) +
                         ": no key maps plaintext to the observed code");
    }
  }
  return report;
}

// Intersects recovery reports from several known blocks under the same key
// (and, for this scheme, the same game). Candidate sets only ever shrink.
inline KeyRecoveryReport intersect_reports(const KeyRecoveryReport& a,
                                           const KeyRecoveryReport& b) {
  if (a.variant != b.variant) throw PairMismatch("variant mismatch");
  KeyRecoveryReport out = a;
  for (int i = 0; i < 32; ++i) {
    PositionRecovery& pa = out.positions[i];
    const PositionRecovery& pb = b.positions[i];
    if (!pb.observed) continue;
    if (!pa.observed) {
      pa = pb;
      continue;
    }
    std::vector<int> merged;
    std::set_intersection(pa.candidates.begin(), pa.candidates.end(),
                          pb.candidates.begin(), pb.candidates.end(),
                          std::back_inserter(merged));
    if (merged.empty()) {
      throw PairMismatch("position " + std::to_string(i + 1) +
                         ": blocks admit no common key");
    }
    pa.candidates = std::move(merged);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Uniformity evidence (the one-time-pad observation)
// ---------------------------------------------------------------------------

// 99.9% chi-square quantiles. The two exact values cover the output domains
// used here; anything else falls back to the Wilson-Hilferty approximation.
inline double chi_square_critical_999(int dof) {
  if (dof == 63) return 103.44237731987324;
  if (dof == 70) return 112.31693185051572;
  const double z = 3.0902323061678132;  // 99.9% normal quantile
  const double t = 2.0 / (9.0 * dof);
  const double base = 1.0 - t + z * std::sqrt(t);
  return dof * base * base * base;
}

struct UniformityReport {
  Variant variant = Variant::Otp64;
  long long trials = 0;
  uint64_t seed = 0;
  int cells = 0;  // size of the variant's mixed-code domain
  int dof = 0;    // cells - 1
  std::array<double, 32> chi2{};

  double max_chi2() const {
    double m = 0;
    for (double c : chi2) m = std::max(m, c);
    return m;
  }
  double min_chi2() const {
    double m = chi2[0];
    for (double c : chi2) m = std::min(m, c);
    return m;
  }
};

// Fixes one plaintext block, draws a fresh uniform key per position per
// trial, and tabulates the mixed-code distribution each position emits.
// Under otp64 every position should look uniform; under faithful the
// mod-71 fold of an 8-bit XOR is visibly biased.
inline UniformityReport uniformity_evidence(Variant variant, long long trials,
                                            uint64_t seed) {
  if (trials <= 0) throw DomainError("trials must be positive");
  const VariantDomain d = domain_of(variant);
  UniformityReport report;
  report.variant = variant;
  report.trials = trials;
  report.seed = seed;
  report.cells = d.mixed_cells();
  report.dof = report.cells - 1;

  std::array<int, 32> codes;
  const int code_span = d.code_max - d.code_min + 1;
  for (int i = 0; i < 32; ++i) codes[i] = d.code_min + i % code_span;

  std::vector<std::vector<long long>> counts(
      32, std::vector<long long>(report.cells, 0));
  std::mt19937_64 rng(seed);
  const uint64_t key_span = static_cast<uint64_t>(d.key_cells());
  for (long long t = 0; t < trials; ++t) {
    for (int i = 0; i < 32; ++i) {
      int key = d.key_min + static_cast<int>(uniform_below(rng, key_span));
      counts[i][key_mix(codes[i], key, variant) - d.mixed_min]++;
    }
  }

  const double expected = static_cast<double>(trials) / report.cells;
  for (int i = 0; i < 32; ++i) {
    double chi2 = 0;
    for (int c = 0; c < report.cells; ++c) {
      const double delta = counts[i][c] - expected;
      chi2 += delta * delta / expected;
    }
    report.chi2[i] = chi2;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Weak games
// ---------------------------------------------------------------------------

struct WeakGameScore {
  int on_origin = 0;  // of 32
  int plies = 0;

  double fraction_on_origin() const { return on_origin / 32.0; }
};

// Fraction of pieces standing on their starting squares in the final
// position, by provenance tag (a rook that wandered home still counts).
inline WeakGameScore weak_game_score(const GameRecord& record) {
  ReplayResult replay = replay_game(record);
  WeakGameScore score;
  score.plies = static_cast<int>(replay.trace.size());
  for (int i = 0; i < 64; ++i) {
    Square s(i);
    int8_t tag = replay.final.tag_at(s);
    if (tag != kNoTag && canonical_start_square(tag) == s) ++score.on_origin;
  }
  return score;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

inline std::string to_csv(const std::vector<CollisionWitness>& witnesses) {
  std::string out = "key,x1,x2,mixed\n";
  for (const CollisionWitness& w : witnesses) {
    out += std::to_string(w.key) + "," + std::to_string(w.x1) + "," +
           std::to_string(w.x2) + "," + std::to_string(w.mixed) + "\n";
  }
  return out;
}

inline std::string to_text(const AmbiguityStats& s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "ambiguous (code,key) pairs: %lld / %lld (%.2f%%)\n"
                "keys admitting a collision: %d / %d (%.2f%%)\n",
                s.ambiguous_pairs, s.total_pairs,
                100.0 * s.ambiguous_pair_fraction(), s.keys_with_collision,
                s.total_keys, 100.0 * s.colliding_key_fraction());
  return buf;
}

inline std::string to_csv(const KeyRecoveryReport& r) {
  std::string out = "position,origin,status,candidates\n";
  for (const PositionRecovery& p : r.positions) {
    out += std::to_string(p.position) + "," + p.origin.name() + ",";
    if (!p.observed) {
      out += "unobserved,";
    } else if (p.unique()) {
      out += "unique,";
    } else {
      out += "candidates,";
    }
    for (std::size_t i = 0; i < p.candidates.size(); ++i) {
      if (i) out += ';';
      out += std::to_string(p.candidates[i]);
    }
    out += "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# coverage,%.4f\n", r.coverage());
  out += buf;
  return out;
}

inline std::string to_csv(const UniformityReport& r) {
  std::string out = "position,chi2,dof\n";
  char buf[64];
  for (int i = 0; i < 32; ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.3f,%d\n", i + 1, r.chi2[i], r.dof);
    out += buf;
  }
  return out;
}

}  // namespace chessog
