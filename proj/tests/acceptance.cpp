// Acceptance suite: one line per criterion, nonzero exit if any hard
// criterion fails. The two dataset-dependent placement-band criteria are
// advisory; they run only when CHG_LICHESS_PGN points at a real Lichess
// export and report ADVISORY otherwise.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "chessog/analysis.hpp"
#include "chessog/corpus.hpp"

namespace fs = std::filesystem;
using namespace chessog;
using Clock = std::chrono::steady_clock;

namespace {

int g_failed = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  if (!ok) ++g_failed;
}

void advisory(bool ran, bool ok, const std::string& name,
              const std::string& detail) {
  if (!ran) {
    std::printf("[ADVISORY] %s: skipped (%s)\n", name.c_str(), detail.c_str());
  } else {
    std::printf("[ADVISORY-%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
  }
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixture(const char* name) {
  return std::string(CHESSOG_FIXTURE_DIR) + "/" + name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

GameRecord load_remark_game() {
  std::ifstream in(fixture("remark_game.pgn"));
  PgnReader reader(in);
  return *reader.next();
}

std::vector<GameRecord> load_fixture_games() {
  std::ifstream in(fixture("fixture_corpus.pgn"));
  PgnReader reader(in);
  std::vector<GameRecord> games;
  while (auto rec = reader.next()) games.push_back(std::move(*rec));
  return games;
}

int run_cli(const std::string& args, const fs::path& stdout_path) {
  std::string cmd = std::string(CHESSOG_CLI_PATH) + " " + args + " > " +
                    stdout_path.string() + " 2>&1";
  return std::system(cmd.c_str());
}

// --- criteria ---------------------------------------------------------------

void criterion_collision_reproduction(const fs::path& tmp) {
  auto start = Clock::now();
  fs::path csv = tmp / "collisions62.csv";
  int rc = run_cli("collisions --key 62 --out " + csv.string(),
                   tmp / "collisions62.log");
  double elapsed = seconds_since(start);
  std::string out = slurp(csv);
  bool found = out.find("62,9,64,55\n") != std::string::npos;
  bool ok = rc == 0 && found && elapsed < 1.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "collisions --key 62 reports (9, 64) -> 55 %s, %.2fs",
                found ? "exactly" : "NOT FOUND", elapsed);
  report(ok, "collision reproduction", detail);
}

void criterion_exhaustive_noninjectivity() {
  auto start = Clock::now();
  auto got = find_collisions(0, 255);

  // independent oracle enumeration: preimage buckets per (key, mixed) cell
  long long evaluations = 0;
  std::vector<CollisionWitness> oracle;
  for (int key = 0; key <= 255; ++key) {
    std::map<int, std::vector<int>> buckets;
    for (int x = 1; x <= 71; ++x) {
      ++evaluations;
      buckets[(x ^ key) % 71].push_back(x);
    }
    std::vector<CollisionWitness> per_key;
    for (auto& [mixed, xs] : buckets) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
          per_key.push_back({key, xs[i], xs[j], mixed});
        }
      }
    }
    std::sort(per_key.begin(), per_key.end(),
              [](const CollisionWitness& a, const CollisionWitness& b) {
                return std::tie(a.x1, a.x2) < std::tie(b.x1, b.x2);
              });
    oracle.insert(oracle.end(), per_key.begin(), per_key.end());
  }
  AmbiguityStats stats = ambiguity_rate(0, 255);
  double elapsed = seconds_since(start);

  bool ok = evaluations == 18176 && got == oracle &&
            stats.ambiguous_pair_fraction() > 0 && elapsed < 1.0;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "%lld evaluations, %zu witnesses == oracle (%s), ambiguous "
                "fraction %.4f > 0, %.2fs",
                evaluations, got.size(), got == oracle ? "exact" : "MISMATCH",
                stats.ambiguous_pair_fraction(), elapsed);
  report(ok, "exhaustive non-injectivity", detail);
}

void criterion_repaired_round_trip(const std::vector<GameRecord>& games) {
  auto start = Clock::now();
  bool inverse_ok = true;
  for (int x = 1; x <= 71 && inverse_ok; ++x) {
    for (int k = 0; k <= 255; ++k) {
      UnmixResult u =
          key_unmix(key_mix(x, k, Variant::Repaired), k, Variant::Repaired);
      if (!u.unique() || u.code() != x) {
        inverse_ok = false;
        break;
      }
    }
  }

  const Alphabet& alphabet = Alphabet::standard();
  std::mt19937_64 rng(20240817ULL);
  long long failures = 0;
  const int kTrials = 10000;
  for (int t = 0; t < kTrials; ++t) {
    const GameRecord& game = games[t % games.size()];
    std::string block;
    int len = 1 + static_cast<int>(uniform_below(rng, 32));
    for (int i = 0; i < len; ++i) {
      block += alphabet.characters()[uniform_below(rng, 71)];
    }
    while (!block.empty() && block.back() == ' ') block.pop_back();
    Key1 key;
    for (int& e : key) e = static_cast<int>(uniform_below(rng, 256));
    Ciphertext ct = encrypt_block(block, key, game, Variant::Repaired, alphabet);
    DecryptResult r = decrypt_block(ct, key, game, Variant::Repaired, alphabet);
    std::string expected = block + std::string(32 - block.size(), ' ');
    if (!r.exact() || r.plaintext != expected) ++failures;
  }
  double elapsed = seconds_since(start);
  bool ok = inverse_ok && failures == 0 && elapsed < 10.0;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "71x256 inverse %s, %d random block round trips, %lld "
                "failures, %.2fs",
                inverse_ok ? "exact" : "BROKEN", kTrials, failures, elapsed);
  report(ok, "repaired round trip", detail);
}

void criterion_faithful_decryption_failure() {
  const Alphabet& alphabet = Alphabet::standard();
  std::string block = "I.";  // codes 9 and 64
  Key1 key;
  key.fill(62);
  GameRecord game = load_remark_game();
  Ciphertext ct = encrypt_block(block, key, game, Variant::Faithful, alphabet);
  DecryptResult r = decrypt_block(ct, key, game, Variant::Faithful, alphabet);
  bool ok = !r.exact() && r.ambiguities.size() == 2 &&
            r.ambiguities[0].position == 1 && r.ambiguities[1].position == 2 &&
            r.ambiguities[0].candidates == std::vector<char>{'I', '.'} &&
            r.ambiguities[1].candidates == std::vector<char>{'I', '.'};
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "codes {9, 64} under key 62: %zu ambiguous position(s) at "
                "{1, 2}, candidates {'I', '.'}",
                r.ambiguities.size());
  report(ok, "faithful decryption failure", detail);
}

void criterion_kpa() {
  const Alphabet& alphabet = Alphabet::standard();
  GameRecord game = load_remark_game();
  std::mt19937_64 rng(99ULL);

  std::string pt64;
  for (int i = 0; i < 32; ++i) {
    pt64 += alphabet.characters()[uniform_below(rng, 64)];
  }
  Key1 key64;
  for (int& e : key64) e = static_cast<int>(uniform_below(rng, 64));
  Ciphertext ct64 = encrypt_block(pt64, key64, game, Variant::Otp64, alphabet);
  KeyRecoveryReport otp =
      known_plaintext_attack(pt64, ct64, game, Variant::Otp64, alphabet);
  bool otp_ok = otp.coverage() == 1.0;
  for (int i = 0; i < 32; ++i) {
    otp_ok = otp_ok && otp.positions[i].unique() &&
             otp.positions[i].candidates.front() == key64[i];
  }

  // Repaired bound: ceil(256/71) = 4 candidates (the spec text says 3 but
  // its own ceiling arithmetic gives 4; residues 0..42 admit k0+213 too).
  std::string pt;
  for (int i = 0; i < 32; ++i) {
    pt += alphabet.characters()[uniform_below(rng, 71)];
  }
  Key1 key;
  for (int& e : key) e = static_cast<int>(uniform_below(rng, 256));
  Ciphertext ct = encrypt_block(pt, key, game, Variant::Repaired, alphabet);
  KeyRecoveryReport rep =
      known_plaintext_attack(pt, ct, game, Variant::Repaired, alphabet);
  bool rep_ok = true;
  std::size_t max_set = 0;
  for (int i = 0; i < 32; ++i) {
    const auto& c = rep.positions[i].candidates;
    max_set = std::max(max_set, c.size());
    rep_ok = rep_ok && c.size() <= 4 &&
             std::find(c.begin(), c.end(), key[i]) != c.end();
  }
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "otp64 coverage %.2f all exact; repaired sets <= %zu "
                "(= ceil(256/71), spec text said 3) and always hold the key",
                otp.coverage(), max_set);
  report(otp_ok && rep_ok, "known-plaintext attack", detail);
}

void criterion_uniformity() {
  auto start = Clock::now();
  const double crit = chi_square_critical_999(63);
  UniformityReport otp = uniformity_evidence(Variant::Otp64, 100000, 42);
  UniformityReport faithful =
      uniformity_evidence(Variant::Faithful, 100000, 42);
  double elapsed = seconds_since(start);
  bool ok = otp.max_chi2() < crit && faithful.min_chi2() > crit &&
            elapsed < 30.0;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "otp64 max chi2 %.2f < %.2f; faithful min chi2 %.2f > %.2f "
                "(100k trials, seed 42), %.2fs",
                otp.max_chi2(), crit, faithful.min_chi2(), crit, elapsed);
  report(ok, "one-time-pad uniformity", detail);
}

void criterion_remark_game() {
  GameRecord game = load_remark_game();
  ReplayResult r = replay_game(game);
  int captures = 0;
  for (const auto& t : r.trace) captures += t.captured.has_value();
  WeakGameScore score = weak_game_score(game);
  // capture count and weak-game score frozen after the first verified replay
  bool ok = r.trace.size() == 63 && is_checkmate(r.final) && captures == 14 &&
            score.on_origin == 9 &&
            to_fen(r.final) ==
                "r7/1p5Q/pkb1p3/4P3/1B1Q4/6P1/P4P2/RN2KB1R b KQ - 4 32";
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "63 plies, mate %s, %d captures (frozen 14), weak score %d/32 "
                "(frozen 9/32)",
                is_checkmate(r.final) ? "true" : "FALSE", captures,
                score.on_origin);
  report(ok, "32-move example game", detail);
}

void criterion_weak_scores() {
  GameRecord fools;
  for (const char* s : {"f3", "e5", "g4", "Qh4#"}) fools.moves.emplace_back(s);
  WeakGameScore f = weak_game_score(fools);
  WeakGameScore empty = weak_game_score(GameRecord{});
  bool ok = f.on_origin == 28 && f.fraction_on_origin() == 0.875 &&
            empty.on_origin == 32 && empty.fraction_on_origin() == 1.0;
  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "Fool's mate %d/32 = %.3f (want 0.875), empty game %.1f",
                f.on_origin, f.fraction_on_origin(), empty.fraction_on_origin());
  report(ok, "weak-game scoring", detail);
}

void criterion_corpus_invariants(const fs::path& tmp) {
  std::ifstream in(fixture("fixture_corpus.pgn"));
  CorpusOptions opts;
  opts.workers = 4;
  CorpusRun run = analyze_corpus(in, opts);
  const HeatmapAccumulator& acc = run.acc;

  bool kings_ok = acc.games >= 1000 &&
                  acc.total(Color::White, PieceKind::King) == acc.games &&
                  acc.total(Color::Black, PieceKind::King) == acc.games;

  bool shares_ok = true;
  for (PieceKind kind : kSummaryKindOrder) {
    for (Color color : {Color::White, Color::Black}) {
      if (acc.total(color, kind) == 0) continue;
      double sum = 0;
      for (int s = 0; s < 64; ++s) {
        sum += static_cast<double>(acc.count(color, kind, Square(s))) /
               acc.total(color, kind);
      }
      if (std::abs(sum - 1.0) > 1e-9) shares_ok = false;
    }
  }

  bool pawns_ok = true;
  for (int f = 0; f < 8; ++f) {
    for (int r : {0, 7}) {
      if (acc.count(Color::White, PieceKind::Pawn, Square(f, r)) ||
          acc.count(Color::Black, PieceKind::Pawn, Square(f, r))) {
        pawns_ok = false;
      }
    }
  }

  // worker-count independence at the CLI level: byte-identical files
  fs::path rep1 = tmp / "rep1", rep8 = tmp / "rep8";
  std::string pgn = fixture("fixture_corpus.pgn");
  int rc1 = run_cli("analyze --pgn " + pgn + " --workers 1 --out " +
                        rep1.string(),
                    tmp / "analyze1.log");
  int rc8 = run_cli("analyze --pgn " + pgn + " --workers 8 --out " +
                        rep8.string(),
                    tmp / "analyze8.log");
  bool bytes_ok = rc1 == 0 && rc8 == 0;
  int files = 0;
  if (bytes_ok) {
    for (const auto& entry : fs::directory_iterator(rep1)) {
      ++files;
      if (slurp(entry.path()) != slurp(rep8 / entry.path().filename())) {
        bytes_ok = false;
      }
    }
    bytes_ok = bytes_ok && files == 13;
  }

  bool ok = kings_ok && shares_ok && pawns_ok && bytes_ok;
  char detail[240];
  std::snprintf(detail, sizeof(detail),
                "%llu games: king totals %s, shares sum to 1 %s, pawn ranks "
                "1/8 clean %s, workers 1 vs 8 byte-identical over %d files %s",
                static_cast<unsigned long long>(acc.games),
                kings_ok ? "ok" : "BAD", shares_ok ? "ok" : "BAD",
                pawns_ok ? "yes" : "NO", files, bytes_ok ? "ok" : "BAD");
  report(ok, "corpus invariants on the bundled fixture", detail);
}

void criterion_replay_throughput(const std::vector<GameRecord>& games) {
  // informational target attached to the advisory criterion: games replayed
  // per second per core
  auto start = Clock::now();
  uint64_t plies = 0;
  for (const GameRecord& rec : games) {
    Board b = replay_final(rec);
    plies += static_cast<uint64_t>(b.ply_count());
  }
  double elapsed = seconds_since(start);
  double rate = games.size() / elapsed;
  advisory(true, rate >= 5000.0, "replay throughput",
           std::to_string(static_cast<long long>(rate)) +
               " games/s on one core (target 5000)");
}

void criterion_table1_band() {
  const char* path = std::getenv("CHG_LICHESS_PGN");
  if (!path || !*path) {
    advisory(false, false, "placement band (dataset-dependent)",
             "set CHG_LICHESS_PGN to a Lichess PGN export to evaluate");
    advisory(false, false, "mean game length band (dataset-dependent)",
             "set CHG_LICHESS_PGN to a Lichess PGN export to evaluate");
    return;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    advisory(true, false, "placement band (dataset-dependent)",
             std::string("cannot open ") + path);
    return;
  }
  CorpusOptions opts;
  opts.filter.min_avg_rating = 2500;
  opts.filter.exclude_bullet = true;
  opts.workers = static_cast<int>(std::thread::hardware_concurrency());
  if (opts.workers < 1) opts.workers = 1;
  CorpusRun run = analyze_corpus(in, opts);
  if (run.kept < 10000) {
    advisory(true, false, "placement band (dataset-dependent)",
             "only " + std::to_string(run.kept) +
                 " games after filtering; need >= 10000");
    return;
  }
  SummaryReport rep = summarize(run.acc, Normalization::PerOccurrence);
  const PieceSummary& wk = rep.pieces[0];
  const PieceSummary& bk = rep.pieces[1];
  bool kings_ok = wk.max_square.name() == "g1" &&
                  std::abs(wk.max_share - 22.28) <= 5.0 &&
                  bk.max_square.name() == "g8" &&
                  std::abs(bk.max_share - 22.46) <= 5.0;
  char detail[240];
  std::snprintf(detail, sizeof(detail),
                "%llu games kept: white king %s %.2f%% (band 22.28+-5), black "
                "king %s %.2f%% (band 22.46+-5)",
                static_cast<unsigned long long>(run.kept),
                wk.max_square.name().c_str(), wk.max_share,
                bk.max_square.name().c_str(), bk.max_share);
  advisory(true, kings_ok, "placement band (dataset-dependent)", detail);

  bool plies_ok = std::abs(rep.corpus.mean_plies - 86.0) <= 10.0;
  char detail2[120];
  std::snprintf(detail2, sizeof(detail2), "mean %.1f plies (band 86+-10)",
                rep.corpus.mean_plies);
  advisory(true, plies_ok, "mean game length band (dataset-dependent)",
           detail2);
}

}  // namespace

int main() {
  fs::path tmp = fs::path("acceptance_tmp");
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  std::vector<GameRecord> fixture_games = load_fixture_games();

  criterion_collision_reproduction(tmp);
  criterion_exhaustive_noninjectivity();
  criterion_repaired_round_trip(fixture_games);
  criterion_faithful_decryption_failure();
  criterion_kpa();
  criterion_uniformity();
  criterion_remark_game();
  criterion_weak_scores();
  criterion_corpus_invariants(tmp);
  criterion_table1_band();
  criterion_replay_throughput(fixture_games);

  fs::remove_all(tmp);
  if (g_failed) {
    std::printf("%d hard criterion(s) FAILED\n", g_failed);
    return 1;
  }
  std::printf("all hard criteria passed\n");
  return 0;
}
