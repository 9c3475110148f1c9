#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace surgq {

enum class Errc {
  dimension_mismatch,
  invalid_class_id,
  non_contiguous_section_ids,
  impure_section,
  invalid_grid,
  missing_section,
  degenerate_ring,
  empty_series,
  zero_norm_feature,
  empty_corpus,
  empty_index,
  grid_mismatch,
  ragged_judgments,
  length_mismatch,
  unknown_option,
  path_too_short,
  dangling_section,
  dangling_frame_ref,
  empty_correct_set,
  empty_region,
  backend_unavailable,
  corrupt_manifest,
  missing_asset,
  unknown_source_class,
  invalid_spec,
  invalid_argument,
  parse_error,
  io_error,
  not_found,
  validation_failed,
  stale_index,
  conflict,
};

std::string_view errc_name(Errc code);

/// Base of every error raised by the engine. `code()` is stable and is what
/// callers (and the HTTP layer) dispatch on; `what()` is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class InvalidClassId : public Error {
 public:
  InvalidClassId(int value, std::size_t position);

  int value() const noexcept { return value_; }
  std::size_t position() const noexcept { return position_; }

 private:
  int value_;
  std::size_t position_;
};

class MissingSection : public Error {
 public:
  explicit MissingSection(std::uint32_t id);

  std::uint32_t id() const noexcept { return id_; }

 private:
  std::uint32_t id_;
};

class MissingAsset : public Error {
 public:
  explicit MissingAsset(std::string path);

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Malformed wire payload; `path()` is a JSON pointer to the offending value.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& message);

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace surgq
