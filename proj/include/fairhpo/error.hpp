// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fairhpo {

// Base for every error the library raises. `kind()` is a stable
// machine-readable tag used by the CLI's --json error output and the HTTP
// layer's status mapping.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// Caller passed something that violates a precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

// Malformed input data (CSV cells, archive lines, config files).
class DataError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "data_error"; }
};

// A referenced run, archive, evaluation or metric does not exist.
class NotFound : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_found"; }
};

// Metric name outside the fixed vocabulary, or a metric the data at hand
// does not carry.
class UnknownMetric : public NotFound {
 public:
  using NotFound::NotFound;
  const char* kind() const noexcept override { return "unknown_metric"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io_error"; }
};

}  // namespace fairhpo
