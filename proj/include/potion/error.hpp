#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace potion {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or unreadable input: corpus records, model files, I/O.
class InputError : public Error {
 public:
  using Error::Error;
};

// Inputs parse fine but the requested computation is degenerate.
class DomainError : public Error {
 public:
  using Error::Error;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

class MalformedRecord : public InputError {
 public:
  MalformedRecord(std::size_t line_no, const std::string& reason)
      : InputError("line " + std::to_string(line_no) + ": " + reason),
        line_no_(line_no) {}
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

class UnknownCategory : public InputError {
 public:
  UnknownCategory(const std::string& name, std::size_t line_no = 0)
      : InputError((line_no ? "line " + std::to_string(line_no) + ": " : std::string{}) +
                   "unknown category '" + name + "'"),
        name_(name),
        line_no_(line_no) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::string name_;
  std::size_t line_no_;
};

class DuplicateId : public InputError {
 public:
  explicit DuplicateId(const std::string& id)
      : InputError("duplicate recipe id '" + id + "'"), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class EmptyCorpus : public InputError {
 public:
  EmptyCorpus() : InputError("corpus contains no records") {}
};

class NoFragments : public InputError {
 public:
  NoFragments() : InputError("recipe text contains no sentence content") {}
};

class EmptyPool : public DomainError {
 public:
  explicit EmptyPool(const std::string& kind)
      : DomainError("fragment pool has no " + kind + " fragments"), kind_(kind) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class PoolTooSmall : public DomainError {
 public:
  using DomainError::DomainError;
};

class ExhaustedRetries : public DomainError {
 public:
  ExhaustedRetries(std::size_t index, std::size_t limit)
      : DomainError("no novel recipe for index " + std::to_string(index) + " after " +
                    std::to_string(limit) + " resamples"),
        limit_(limit) {}
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t limit_;
};

class InvalidConfig : public InputError {
 public:
  using InputError::InputError;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateDataset : public DomainError {
 public:
  DegenerateDataset() : DomainError("training dataset contains no recipes") {}
};

class CorruptModel : public InputError {
 public:
  explicit CorruptModel(const std::string& reason)
      : InputError("corrupt model file: " + reason) {}
};

class VersionMismatch : public InputError {
 public:
  VersionMismatch(unsigned found, unsigned expected)
      : InputError("model version " + std::to_string(found) + " does not match " +
                   std::to_string(expected)) {}
};

}  // namespace potion
