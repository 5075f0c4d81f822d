// Map-reduce corpus pipeline: one reader thread streams games off the PGN,
// worker threads replay and accumulate, and the integer-valued accumulators
// are merged at the end. Because merging is associative and commutative the
// outputs are byte-identical for any worker count or batch partitioning.
#pragma once

#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <thread>

#include "chessog/pgn.hpp"
#include "chessog/stats.hpp"

namespace chessog {

// Replay without trace bookkeeping; still enforces the '#'-implies-mate check.
inline Board replay_final(const GameRecord& record) {
  Board b = Board::initial();
  for (std::size_t idx = 0; idx < record.moves.size(); ++idx) {
    const std::string& san = record.moves[idx];
    try {
      b = detail::apply_unchecked(b, parse_san(b, san));
      if (san.find('#') != std::string::npos && !is_checkmate(b)) {
        throw IllegalSan("'" + san + "' claims mate but position is not mate");
      }
    } catch (const Error& e) {
      throw ReplayError(idx + 1, e.what());
    }
  }
  return b;
}

struct CorpusOptions {
  FilterSpec filter;
  int workers = 1;
  PgnReader::ErrorMode error_mode = PgnReader::ErrorMode::SkipAndContinue;
};

struct CorpusRun {
  HeatmapAccumulator acc;
  uint64_t parsed = 0;         // games successfully pulled off the PGN
  uint64_t skipped_syntax = 0; // games dropped by the PGN skip mode
  uint64_t filtered_out = 0;   // games rejected by the filter spec
  uint64_t failed_replay = 0;  // games whose movetext does not replay
  uint64_t kept = 0;           // games that made it into the accumulator
};

namespace detail {

struct CorpusWorkerState {
  HeatmapAccumulator acc;
  uint64_t failed_replay = 0;

  void consume(const GameRecord& rec) {
    try {
      Board final_position = replay_final(rec);
      accumulate(acc, final_position, rec.result,
                 static_cast<int>(rec.moves.size()));
    } catch (const ReplayError&) {
      ++failed_replay;
    }
  }
};

// Bounded batch queue; keeps memory O(batches in flight), not O(file).
class BatchQueue {
 public:
  explicit BatchQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(std::vector<GameRecord>&& batch) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return batches_.size() < capacity_; });
    batches_.push_back(std::move(batch));
    not_empty_.notify_one();
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
  }

  bool pop(std::vector<GameRecord>& out) {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !batches_.empty() || closed_; });
    if (batches_.empty()) return false;
    out = std::move(batches_.front());
    batches_.pop_front();
    not_full_.notify_one();
    return true;
  }

 private:
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<std::vector<GameRecord>> batches_;
  std::size_t capacity_;
  bool closed_ = false;
};

}  // namespace detail

inline CorpusRun analyze_corpus(std::istream& pgn, const CorpusOptions& opts) {
  if (opts.workers < 1) throw DomainError("worker count must be >= 1");
  CorpusRun run;
  PgnReader reader(pgn, opts.error_mode);

  if (opts.workers == 1) {
    detail::CorpusWorkerState state;
    while (auto rec = reader.next()) {
      ++run.parsed;
      if (!opts.filter.matches(*rec)) {
        ++run.filtered_out;
        continue;
      }
      state.consume(*rec);
    }
    run.acc = state.acc;
    run.failed_replay = state.failed_replay;
  } else {
    constexpr std::size_t kBatchSize = 64;
    detail::BatchQueue queue(static_cast<std::size_t>(opts.workers) * 2);
    std::vector<detail::CorpusWorkerState> states(opts.workers);
    std::vector<std::thread> threads;
    threads.reserve(opts.workers);
    for (int w = 0; w < opts.workers; ++w) {
      threads.emplace_back([&queue, &state = states[w]] {
        std::vector<GameRecord> batch;
        while (queue.pop(batch)) {
          for (const GameRecord& rec : batch) state.consume(rec);
        }
      });
    }

    std::vector<GameRecord> batch;
    batch.reserve(kBatchSize);
    while (auto rec = reader.next()) {
      ++run.parsed;
      if (!opts.filter.matches(*rec)) {
        ++run.filtered_out;
        continue;
      }
      batch.push_back(std::move(*rec));
      if (batch.size() == kBatchSize) {
        queue.push(std::move(batch));
        batch.clear();
        batch.reserve(kBatchSize);
      }
    }
    if (!batch.empty()) queue.push(std::move(batch));
    queue.close();
    for (std::thread& t : threads) t.join();
    for (const detail::CorpusWorkerState& s : states) {
      run.acc = merge(run.acc, s.acc);
      run.failed_replay += s.failed_replay;
    }
  }

  run.skipped_syntax = reader.games_skipped();
  run.kept = run.acc.games;
  return run;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace detail

// One CSV per piece (12 files) plus summary.csv; optional SVGs.
inline std::vector<std::string> write_corpus_reports(
    const HeatmapAccumulator& acc, const std::string& out_dir,
    bool with_svg = false) {
  std::vector<std::string> written;
  for (PieceKind kind : kSummaryKindOrder) {
    for (Color color : {Color::White, Color::Black}) {
      std::string base = out_dir + "/" + piece_label(color, kind);
      detail::write_file(base + ".csv",
                         render_heatmap(acc, color, kind, HeatmapFormat::Csv));
      written.push_back(base + ".csv");
      if (with_svg) {
        detail::write_file(base + ".svg",
                           render_heatmap(acc, color, kind, HeatmapFormat::Svg));
        written.push_back(base + ".svg");
      }
    }
  }
  detail::write_file(out_dir + "/summary.csv", summary_csv(acc));
  written.push_back(out_dir + "/summary.csv");
  return written;
}

}  // namespace chessog
