// Error taxonomy shared by all chessog components. Every exception carries a
// short machine-readable class tag that the CLI maps to a distinct exit code.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chessog {

class Error : public std::runtime_error {
 public:
  Error(std::string error_class, const std::string& what)
      : std::runtime_error(what), class_(std::move(error_class)) {}

  const std::string& error_class() const { return class_; }

 private:
  std::string class_;
};

// -- chess core ------------------------------------------------------------

struct MalformedSan : Error {
  explicit MalformedSan(const std::string& w) : Error("san", w) {}
};

struct IllegalSan : Error {
  explicit IllegalSan(const std::string& w) : Error("san", w) {}
};

struct AmbiguousSan : Error {
  explicit AmbiguousSan(const std::string& w) : Error("san", w) {}
};

struct IllegalMove : Error {
  explicit IllegalMove(const std::string& w) : Error("san", w) {}
};

class ReplayError : public Error {
 public:
  ReplayError(std::size_t ply, const std::string& w)
      : Error("replay", "ply " + std::to_string(ply) + ": " + w), ply_(ply) {}

  std::size_t ply() const { return ply_; }

 private:
  std::size_t ply_;
};

// -- pgn -------------------------------------------------------------------

class PgnSyntaxError : public Error {
 public:
  PgnSyntaxError(std::size_t byte_offset, std::size_t line, const std::string& w)
      : Error("pgn-syntax", "line " + std::to_string(line) + ", byte " +
                                std::to_string(byte_offset) + ": " + w),
        byte_offset_(byte_offset),
        line_(line) {}

  std::size_t byte_offset() const { return byte_offset_; }
  std::size_t line() const { return line_; }

 private:
  std::size_t byte_offset_;
  std::size_t line_;
};

struct BadPredicate : Error {
  explicit BadPredicate(const std::string& w) : Error("predicate", w) {}
};

// -- cipher ----------------------------------------------------------------

struct CharNotInAlphabet : Error {
  explicit CharNotInAlphabet(const std::string& w) : Error("alphabet", w) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error("domain", w) {}
};

struct NoPreimage : Error {
  explicit NoPreimage(const std::string& w) : Error("domain", w) {}
};

struct GameMismatch : Error {
  explicit GameMismatch(const std::string& w) : Error("mismatch", w) {}
};

struct PairMismatch : Error {
  explicit PairMismatch(const std::string& w) : Error("mismatch", w) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& w)
      : Error("parse", "line " + std::to_string(line) + ": " + w), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// -- stats -----------------------------------------------------------------

struct EmptyCorpus : Error {
  explicit EmptyCorpus(const std::string& w) : Error("empty-corpus", w) {}
};

struct UnknownPiece : Error {
  explicit UnknownPiece(const std::string& w) : Error("usage", w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error("io", w) {}
};

}  // namespace chessog
