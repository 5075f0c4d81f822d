// chessog: command-line workbench around the Chessography cipher and the
// final-position statistics pipeline.
//
// Exit codes: 0 ok, 1 usage, 2 io, 3 bad data (PGN/SAN/ciphertext parse or
// replay), 4 ambiguous decryption, 5 plaintext/ciphertext/game mismatch,
// 6 domain error (alphabet, key ranges, schedule shape).
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chessog/analysis.hpp"
#include "chessog/cipher.hpp"
#include "chessog/corpus.hpp"

namespace fs = std::filesystem;
using namespace chessog;

namespace {

bool verbose_logging() {
  const char* env = std::getenv("CHG_LOG");
  return env && *env && std::string_view(env) != "0";
}

void log_verbose(const std::string& msg) {
  if (verbose_logging()) std::cerr << "chessog: " << msg << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("short write to '" + path + "'");
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

std::vector<GameRecord> load_games(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  PgnReader reader(in, PgnReader::ErrorMode::Strict);
  std::vector<GameRecord> games;
  while (auto rec = reader.next()) games.push_back(std::move(*rec));
  return games;
}

GameRecord load_single_game(const std::string& path) {
  auto games = load_games(path);
  if (games.size() != 1) {
    throw DomainError("'" + path + "' must contain exactly one game, has " +
                      std::to_string(games.size()));
  }
  return std::move(games.front());
}

Variant variant_from_flag(const std::string& name) {
  auto v = variant_from_name(name);
  if (!v) throw DomainError("unknown variant '" + name + "'");
  return *v;
}

// Key file: one line of 32 integers per key.
std::vector<Key1> load_keys(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<Key1> keys;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    Key1 key;
    for (int i = 0; i < 32; ++i) {
      if (!(fields >> key[i])) {
        throw ParseError(lineno, "key line needs 32 integers");
      }
    }
    int extra;
    if (fields >> extra) throw ParseError(lineno, "key line has extra fields");
    keys.push_back(key);
  }
  if (keys.empty()) throw ParseError(lineno, "key file is empty");
  return keys;
}

KeySchedule make_schedule(std::vector<Key1> keys, const std::string& mode) {
  KeySchedule schedule;
  schedule.keys = std::move(keys);
  if (mode == "same") {
    schedule.mode = KeySchedule::Mode::SameKeyAllBlocks;
  } else if (mode == "fresh") {
    schedule.mode = KeySchedule::Mode::PerBlockFreshKey;
  } else {
    throw DomainError("key mode must be 'same' or 'fresh'");
  }
  return schedule;
}

FilterSpec filter_from_flags(double min_avg_rating, bool exclude_bullet) {
  FilterSpec spec;
  if (min_avg_rating > 0) spec.min_avg_rating = min_avg_rating;
  spec.exclude_bullet = exclude_bullet;
  return spec;
}

// The 32-move demonstration game: every flaw demo needs a game with
// captures, promotion and a mate, and this one ends in a body count.
const char* kDemoGamePgn =
    "[Event \"demo\"]\n[Result \"1-0\"]\n\n"
    "1. b4 e6 2. c3 f5 3. g3 g6 4. Nf3 Bd6 5. h4 Nf6 6. Nd4 a6 7. e3 Bf8\n"
    "8. Qf3 Nd5 9. Nc2 Nc6 10. e4 Ne5 11. Qe2 fxe4 12. d4 c5 13. dxe5 cxb4\n"
    "14. cxb4 Rb8 15. Bg5 Qc7 16. h5 Ra8 17. hxg6 Be7 18. g7 Bxb4+ 19. Nxb4\n"
    "h6 20. Bxh6 d6 21. Qh5+ Ke7 22. Qg5+ Kf7 23. gxh8=Q Nxb4 24. Qh7+ Ke8\n"
    "25. Qh5+ Kd8 26. Bg5+ Qe7 27. Bxe7+ Kd7 28. Bxd6+ Kc6 29. Bxb4 Bd7\n"
    "30. Qxe4+ Kb6 31. Qhh7 Bc6 32. Qd4# 1-0\n";

GameRecord demo_game() {
  std::istringstream in(kDemoGamePgn);
  PgnReader reader(in);
  return *reader.next();
}

struct CorpusFlags {
  std::string pgn_path;
  double min_avg_rating = 0;
  bool exclude_bullet = false;
  bool strict = false;
  int workers = 1;
};

CorpusRun run_corpus(const CorpusFlags& flags) {
  std::ifstream in(flags.pgn_path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + flags.pgn_path + "'");
  CorpusOptions opts;
  opts.filter = filter_from_flags(flags.min_avg_rating, flags.exclude_bullet);
  opts.workers = flags.workers;
  opts.error_mode = flags.strict ? PgnReader::ErrorMode::Strict
                                 : PgnReader::ErrorMode::SkipAndContinue;
  log_verbose("analyzing " + flags.pgn_path + " with " +
              std::to_string(flags.workers) + " worker(s)");
  return analyze_corpus(in, opts);
}

void print_corpus_summary(const CorpusRun& run) {
  SummaryReport rep = summarize(run.acc, Normalization::PerOccurrence);
  std::printf("games parsed:    %llu\n", static_cast<unsigned long long>(run.parsed));
  std::printf("games kept:      %llu\n", static_cast<unsigned long long>(run.kept));
  std::printf("filtered out:    %llu\n", static_cast<unsigned long long>(run.filtered_out));
  std::printf("syntax skipped:  %llu\n", static_cast<unsigned long long>(run.skipped_syntax));
  std::printf("replay failures: %llu\n", static_cast<unsigned long long>(run.failed_replay));
  std::printf("mean plies:      %.1f (%.1f moves)\n", rep.corpus.mean_plies,
              rep.corpus.mean_moves);
  std::printf("white wins: %.2f%%  black wins: %.2f%%  draws: %.2f%%  other: %.2f%%\n",
              rep.corpus.white_win_share, rep.corpus.black_win_share,
              rep.corpus.draw_share, rep.corpus.unknown_share);
}

int cmd_encrypt(const std::string& text_arg, const std::string& in_path,
                const std::string& game_path, const std::string& key_path,
                const std::string& variant_name_arg, const std::string& key_mode,
                const std::string& out_path) {
  std::string plaintext = !in_path.empty() ? read_file(in_path) : text_arg;
  while (!plaintext.empty() &&
         (plaintext.back() == '\n' || plaintext.back() == '\r')) {
    plaintext.pop_back();
  }
  Variant variant = variant_from_flag(variant_name_arg);
  KeySchedule schedule = make_schedule(load_keys(key_path), key_mode);
  std::vector<GameRecord> games = load_games(game_path);
  if (schedule.mode == KeySchedule::Mode::SameKeyAllBlocks &&
      games.size() != 1) {
    throw DomainError("same-key mode needs a PGN with exactly one game");
  }
  auto blocks = encrypt_message(plaintext, schedule, games, variant);
  std::string out;
  for (const Ciphertext& ct : blocks) out += serialize(ct);
  write_or_print(out_path, out);
  log_verbose("encrypted " + std::to_string(blocks.size()) + " block(s)");
  return 0;
}

int cmd_decrypt(const std::string& in_path, const std::string& game_path,
                const std::string& key_path, const std::string& key_mode,
                const std::string& out_path) {
  auto blocks = deserialize_all(read_file(in_path));
  if (blocks.empty()) throw ParseError(0, "no ciphertext blocks in input");
  const Variant variant = blocks.front().variant;
  for (const Ciphertext& ct : blocks) {
    if (ct.variant != variant) {
      throw ParseError(0, "mixed variants in one ciphertext file");
    }
  }
  KeySchedule schedule = make_schedule(load_keys(key_path), key_mode);
  std::vector<GameRecord> games = load_games(game_path);
  MessageDecryptResult result =
      decrypt_message(blocks, schedule, games, variant);
  write_or_print(out_path, result.plaintext + "\n");
  if (!result.exact()) {
    std::cerr << "error: ambiguous: " << result.ambiguities.size()
              << " position(s) have multiple plaintext candidates\n";
    for (const auto& [block, amb] : result.ambiguities) {
      std::cerr << "  block " << block + 1 << " position " << amb.position
                << ": ";
      for (std::size_t i = 0; i < amb.candidates.size(); ++i) {
        std::cerr << (i ? " | " : "") << "'" << amb.candidates[i] << "'";
      }
      std::cerr << "\n";
    }
    return 4;
  }
  return 0;
}

int cmd_collisions(int key, int key_lo, int key_hi, const std::string& out) {
  if (key >= 0) key_lo = key_hi = key;
  auto witnesses = find_collisions(key_lo, key_hi);
  write_or_print(out, to_csv(witnesses));
  std::cerr << witnesses.size() << " witness(es) for keys [" << key_lo << ", "
            << key_hi << "]\n";
  return 0;
}

int cmd_kpa(const std::string& pt_path, const std::string& ct_path,
            const std::string& game_path, bool survivors_only,
            const std::string& out) {
  std::string pt = read_file(pt_path);
  while (!pt.empty() && (pt.back() == '\n' || pt.back() == '\r')) pt.pop_back();
  auto blocks = deserialize_all(read_file(ct_path));
  if (blocks.empty()) throw ParseError(0, "no ciphertext blocks in input");
  GameRecord game = load_single_game(game_path);

  KeyRecoveryReport report;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::string_view chunk =
        std::string_view(pt).substr(std::min(pt.size(), b * 32),
                                    std::min<std::size_t>(32, pt.size() - std::min(pt.size(), b * 32)));
    KeyRecoveryReport one = known_plaintext_attack(
        chunk, blocks[b], game, blocks[b].variant, Alphabet::standard(),
        survivors_only);
    report = b == 0 ? one : intersect_reports(report, one);
  }
  write_or_print(out, to_csv(report));
  std::fprintf(stderr, "coverage: %.4f (%d of 32 positions pinned)\n",
               report.coverage(), report.uniquely_recovered());
  return 0;
}

int cmd_weak_score(const std::string& pgn_path, const std::string& out) {
  std::ifstream in(pgn_path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + pgn_path + "'");
  PgnReader reader(in, PgnReader::ErrorMode::SkipAndContinue);
  std::string csv = "game,plies,on_origin,fraction\n";
  std::size_t index = 0;
  double sum = 0;
  while (auto rec = reader.next()) {
    ++index;
    WeakGameScore score = weak_game_score(*rec);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%.4f\n", index, score.plies,
                  score.on_origin, score.fraction_on_origin());
    csv += buf;
    sum += score.fraction_on_origin();
  }
  if (index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# mean_fraction,%.4f\n", sum / index);
    csv += buf;
  }
  write_or_print(out, csv);
  return 0;
}

int cmd_demo_flaws(uint64_t seed, long long trials, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const Alphabet& alphabet = Alphabet::standard();
  GameRecord game = demo_game();

  log_verbose("enumerating collisions");
  auto witnesses = find_collisions(0, 255);
  write_file(out_dir + "/collisions.csv", to_csv(witnesses));
  CollisionWitness worked{62, 9, 64, 55};
  bool has_worked =
      std::find(witnesses.begin(), witnesses.end(), worked) != witnesses.end();
  std::printf("collisions: %zu witnesses over keys 0..255; worked example "
              "(key 62: 9 vs 64 -> 55) %s\n",
              witnesses.size(), has_worked ? "present" : "MISSING");

  AmbiguityStats stats = ambiguity_rate(0, 255);
  write_file(out_dir + "/ambiguity.txt", to_text(stats));
  std::printf("ambiguity: %.2f%% of (code,key) pairs decrypt ambiguously; "
              "%.2f%% of keys admit a collision\n",
              100.0 * stats.ambiguous_pair_fraction(),
              100.0 * stats.colliding_key_fraction());

  log_verbose("running uniformity trials");
  const double crit = chi_square_critical_999(63);
  UniformityReport otp = uniformity_evidence(Variant::Otp64, trials, seed);
  write_file(out_dir + "/uniformity_otp64.csv", to_csv(otp));
  std::printf("otp64 uniformity: max chi2 %.2f %s 99.9%% critical %.2f "
              "(63 dof, %lld trials, seed %llu)\n",
              otp.max_chi2(), otp.max_chi2() < crit ? "<" : ">=", crit, trials,
              static_cast<unsigned long long>(seed));

  UniformityReport faithful =
      uniformity_evidence(Variant::Faithful, trials, seed);
  write_file(out_dir + "/uniformity_faithful.csv", to_csv(faithful));
  std::printf("faithful uniformity: min chi2 %.2f %s 99.9%% critical %.2f "
              "(mod-71 bias)\n",
              faithful.min_chi2(), faithful.min_chi2() > crit ? ">" : "<=",
              crit);

  log_verbose("running canned known-plaintext attacks");
  std::mt19937_64 rng(seed);
  std::string pt;
  for (int i = 0; i < 32; ++i) {
    pt += alphabet.characters()[uniform_below(rng, 64)];
  }
  for (Variant v : {Variant::Otp64, Variant::Repaired}) {
    Key1 key;
    const VariantDomain d = domain_of(v);
    for (int& e : key) {
      e = d.key_min +
          static_cast<int>(uniform_below(rng, static_cast<uint64_t>(d.key_cells())));
    }
    Ciphertext ct = encrypt_block(pt, key, game, v, alphabet, "demo");
    KeyRecoveryReport report =
        known_plaintext_attack(pt, ct, game, v, alphabet);
    std::string name = std::string("kpa_") + std::string(variant_name(v));
    write_file(out_dir + "/" + name + ".csv", to_csv(report));
    KeyRecoveryReport partial =
        known_plaintext_attack(pt, ct, game, v, alphabet, true);
    write_file(out_dir + "/" + name + "_survivors_only.csv", to_csv(partial));
    std::printf("%s KPA: coverage %.4f with capture log, %.4f from the final "
                "board alone\n",
                std::string(variant_name(v)).c_str(), report.coverage(),
                partial.coverage());
  }
  std::printf("reports written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_analyze(const CorpusFlags& flags, const std::string& out_dir,
                const std::string& format) {
  bool with_svg = format.find("svg") != std::string::npos;
  bool with_csv = format.find("csv") != std::string::npos;
  if (!with_csv && !with_svg) {
    throw DomainError("--format must name csv and/or svg");
  }
  CorpusRun run = run_corpus(flags);
  if (run.acc.games == 0) throw EmptyCorpus("no games survived the filters");
  fs::create_directories(out_dir);
  write_corpus_reports(run.acc, out_dir, with_svg);
  print_corpus_summary(run);
  return 0;
}

int cmd_heatmap(const CorpusFlags& flags, const std::string& pieces_arg,
                const std::string& format_name, const std::string& out_dir) {
  HeatmapFormat format;
  if (format_name == "text-grid") {
    format = HeatmapFormat::TextGrid;
  } else if (format_name == "csv") {
    format = HeatmapFormat::Csv;
  } else if (format_name == "svg") {
    format = HeatmapFormat::Svg;
  } else {
    throw DomainError("--format must be text-grid, csv or svg");
  }

  std::vector<std::pair<Color, PieceKind>> pieces;
  std::stringstream tokens(pieces_arg);
  std::string token;
  while (std::getline(tokens, token, ',')) {
    if (token.empty()) continue;
    if (token == "all") {
      for (PieceKind k : kSummaryKindOrder) {
        pieces.emplace_back(Color::White, k);
        pieces.emplace_back(Color::Black, k);
      }
    } else if (token.find('-') == std::string::npos &&
               token.find('_') == std::string::npos) {
      // bare kind: both colors
      pieces.push_back(piece_from_token("white-" + token));
      pieces.push_back(piece_from_token("black-" + token));
    } else {
      pieces.push_back(piece_from_token(token));
    }
  }
  if (pieces.empty()) throw UnknownPiece("no pieces requested");

  CorpusRun run = run_corpus(flags);
  if (run.acc.games == 0) throw EmptyCorpus("no games survived the filters");
  for (auto [color, kind] : pieces) {
    std::string doc = render_heatmap(run.acc, color, kind, format);
    if (out_dir.empty()) {
      std::cout << doc;
      if (format == HeatmapFormat::TextGrid) std::cout << "\n";
    } else {
      fs::create_directories(out_dir);
      const char* ext = format == HeatmapFormat::Svg
                            ? ".svg"
                            : format == HeatmapFormat::Csv ? ".csv" : ".txt";
      write_file(out_dir + "/" + piece_label(color, kind) + ext, doc);
    }
  }
  return 0;
}

int exit_code_for(const Error& e) {
  const std::string& c = e.error_class();
  if (c == "io") return 2;
  if (c == "pgn-syntax" || c == "replay" || c == "san" || c == "parse") return 3;
  if (c == "mismatch") return 5;
  if (c == "domain" || c == "alphabet") return 6;
  return 1;  // usage, predicate, empty-corpus
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chessography cipher workbench and final-position analyzer"};
  app.require_subcommand(1);

  // encrypt
  auto* enc = app.add_subcommand("encrypt", "Encrypt a message with a chess game");
  std::string enc_text, enc_in, enc_game, enc_key, enc_out = "-";
  std::string enc_variant = "repaired", enc_mode = "same";
  enc->add_option("--text", enc_text, "Plaintext on the command line");
  enc->add_option("--in", enc_in, "Plaintext file (trailing newline ignored)");
  enc->add_option("--game", enc_game, "PGN with the game(s) driving the permutation")->required();
  enc->add_option("--key-file", enc_key, "Key file: 32 integers per line")->required();
  enc->add_option("--variant", enc_variant, "faithful | repaired | otp64");
  enc->add_option("--key-mode", enc_mode, "same | fresh (per block)");
  enc->add_option("--out", enc_out, "Ciphertext output file, '-' for stdout");

  // decrypt
  auto* dec = app.add_subcommand("decrypt", "Decrypt ciphertext blocks");
  std::string dec_in, dec_game, dec_key, dec_out = "-";
  std::string dec_mode = "same";
  dec->add_option("--in", dec_in, "Ciphertext file")->required();
  dec->add_option("--game", dec_game, "PGN with the matching game(s)")->required();
  dec->add_option("--key-file", dec_key, "Key file: 32 integers per line")->required();
  dec->add_option("--key-mode", dec_mode, "same | fresh (per block)");
  dec->add_option("--out", dec_out, "Plaintext output file, '-' for stdout");

  // collisions
  auto* col = app.add_subcommand("collisions", "Enumerate faithful-mixing collisions");
  int col_key = -1, col_lo = 0, col_hi = 255;
  std::string col_out = "-";
  col->add_option("--key", col_key, "Single key to scan");
  col->add_option("--key-lo", col_lo, "Range start (default 0)");
  col->add_option("--key-hi", col_hi, "Range end (default 255)");
  col->add_option("--out", col_out, "CSV output, '-' for stdout");

  // kpa
  auto* kpa = app.add_subcommand("kpa", "Known-plaintext key recovery");
  std::string kpa_pt, kpa_ct, kpa_game, kpa_out = "-";
  bool kpa_survivors = false;
  kpa->add_option("--pt", kpa_pt, "Known plaintext file")->required();
  kpa->add_option("--ct", kpa_ct, "Matching ciphertext file")->required();
  kpa->add_option("--game", kpa_game, "PGN with the game")->required();
  kpa->add_flag("--survivors-only", kpa_survivors,
                "Withhold the capture log from the attacker");
  kpa->add_option("--out", kpa_out, "CSV output, '-' for stdout");

  // weak-score
  auto* weak = app.add_subcommand("weak-score", "Score games by pieces left on origin");
  std::string weak_pgn, weak_out = "-";
  weak->add_option("--pgn", weak_pgn, "PGN file")->required();
  weak->add_option("--out", weak_out, "CSV output, '-' for stdout");

  // demo-flaws
  auto* demo = app.add_subcommand("demo-flaws", "Run every flaw demonstration");
  uint64_t demo_seed = 42;
  long long demo_trials = 100000;
  std::string demo_out = "flaw-reports";
  demo->add_option("--seed", demo_seed, "RNG seed (default 42)");
  demo->add_option("--trials", demo_trials, "Uniformity trials (default 100000)");
  demo->add_option("--out", demo_out, "Report directory");

  // analyze
  auto* ana = app.add_subcommand("analyze", "Replay a PGN corpus into heatmap reports");
  CorpusFlags ana_flags;
  std::string ana_out = "corpus-reports", ana_format = "csv";
  ana->add_option("--pgn", ana_flags.pgn_path, "PGN corpus")->required();
  ana->add_option("--min-avg-rating", ana_flags.min_avg_rating,
                  "Keep games with average Elo at or above this");
  ana->add_flag("--exclude-bullet", ana_flags.exclude_bullet,
                "Drop games whose initial clock is under 180s");
  ana->add_flag("--strict", ana_flags.strict, "Abort on PGN syntax errors");
  ana->add_option("--workers", ana_flags.workers, "Worker threads (default 1)");
  ana->add_option("--out", ana_out, "Report directory");
  ana->add_option("--format", ana_format, "csv, svg or csv,svg");

  // heatmap
  auto* heat = app.add_subcommand("heatmap", "Render per-piece heatmaps");
  CorpusFlags heat_flags;
  std::string heat_pieces = "king", heat_format = "text-grid", heat_out;
  heat->add_option("--pgn", heat_flags.pgn_path, "PGN corpus")->required();
  heat->add_option("--pieces", heat_pieces,
                   "Comma list: king | white-king | all ...");
  heat->add_option("--format", heat_format, "text-grid | csv | svg");
  heat->add_option("--min-avg-rating", heat_flags.min_avg_rating,
                   "Keep games with average Elo at or above this");
  heat->add_flag("--exclude-bullet", heat_flags.exclude_bullet,
                 "Drop games whose initial clock is under 180s");
  heat->add_option("--workers", heat_flags.workers, "Worker threads");
  heat->add_option("--out", heat_out, "Write files here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (enc->parsed()) {
      if (enc_text.empty() == enc_in.empty()) {
        throw DomainError("encrypt needs exactly one of --text / --in");
      }
      return cmd_encrypt(enc_text, enc_in, enc_game, enc_key, enc_variant,
                         enc_mode, enc_out);
    }
    if (dec->parsed()) {
      return cmd_decrypt(dec_in, dec_game, dec_key, dec_mode, dec_out);
    }
    if (col->parsed()) return cmd_collisions(col_key, col_lo, col_hi, col_out);
    if (kpa->parsed()) {
      return cmd_kpa(kpa_pt, kpa_ct, kpa_game, kpa_survivors, kpa_out);
    }
    if (weak->parsed()) return cmd_weak_score(weak_pgn, weak_out);
    if (demo->parsed()) return cmd_demo_flaws(demo_seed, demo_trials, demo_out);
    if (ana->parsed()) return cmd_analyze(ana_flags, ana_out, ana_format);
    if (heat->parsed()) {
      return cmd_heatmap(heat_flags, heat_pieces, heat_format, heat_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.error_class() << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
