// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace snapens {

// Every failure raised by the library derives from Error. The subclasses map
// onto the CLI exit codes (see tools/commands.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed inconsistent dimensions, out-of-range indices, etc.
class InputError : public Error {
 public:
  using Error::Error;
};

// A training or CLI configuration is invalid. `key()` names the offending key
// when one is known.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  explicit ConfigError(const std::string& what) : ConfigError("", what) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A file exists but its content does not parse. `field()` names the header
// key, column or structural element that failed.
class FormatError : public Error {
 public:
  FormatError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Opening, reading or writing a path failed.
class StorageError : public Error {
 public:
  StorageError(std::string path, const std::string& what)
      : Error(what + ": " + path), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Files parse individually but refer to each other inconsistently.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(long long iteration)
      : Error("diverged at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  long long iteration() const noexcept { return iteration_; }

 private:
  long long iteration_;
};

// Pearson correlation is undefined for a zero-variance vector.
class UndefinedCorrelationError : public Error {
 public:
  explicit UndefinedCorrelationError(std::size_t index)
      : Error("undefined correlation: prediction " + std::to_string(index) +
              " has zero variance"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace snapens
