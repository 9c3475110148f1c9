#include "surgq/error.hpp"

namespace surgq {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::invalid_class_id: return "InvalidClassId";
    case Errc::non_contiguous_section_ids: return "NonContiguousSectionIds";
    case Errc::impure_section: return "ImpureSection";
    case Errc::invalid_grid: return "InvalidGrid";
    case Errc::missing_section: return "MissingSection";
    case Errc::degenerate_ring: return "DegenerateRing";
    case Errc::empty_series: return "EmptySeries";
    case Errc::zero_norm_feature: return "ZeroNormFeature";
    case Errc::empty_corpus: return "EmptyCorpus";
    case Errc::empty_index: return "EmptyIndex";
    case Errc::grid_mismatch: return "GridMismatch";
    case Errc::ragged_judgments: return "RaggedJudgments";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::unknown_option: return "UnknownOption";
    case Errc::path_too_short: return "PathTooShort";
    case Errc::dangling_section: return "DanglingSection";
    case Errc::dangling_frame_ref: return "DanglingFrameRef";
    case Errc::empty_correct_set: return "EmptyCorrectSet";
    case Errc::empty_region: return "EmptyRegion";
    case Errc::backend_unavailable: return "BackendUnavailable";
    case Errc::corrupt_manifest: return "CorruptManifest";
    case Errc::missing_asset: return "MissingAsset";
    case Errc::unknown_source_class: return "UnknownSourceClass";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
    case Errc::not_found: return "NotFound";
    case Errc::validation_failed: return "ValidationFailed";
    case Errc::stale_index: return "StaleIndex";
    case Errc::conflict: return "Conflict";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

InvalidClassId::InvalidClassId(int value, std::size_t position)
    : Error(Errc::invalid_class_id,
            "value " + std::to_string(value) + " at position " + std::to_string(position)),
      value_(value),
      position_(position) {}

MissingSection::MissingSection(std::uint32_t id)
    : Error(Errc::missing_section, "no class assigned to section " + std::to_string(id)), id_(id) {}

MissingAsset::MissingAsset(std::string path)
    : Error(Errc::missing_asset, path), path_(std::move(path)) {}

ParseError::ParseError(std::string path, const std::string& message)
    : Error(Errc::parse_error, (path.empty() ? std::string("/") : path) + ": " + message),
      path_(std::move(path)) {}

}  // namespace surgq
