#include <cstring>

#include "surgq/image_io.hpp"
#include "surgq/keyframes.hpp"

namespace surgq {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'V', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

std::vector<std::uint8_t> encode_sfv(const FeatureSeries& features) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + features.values().size() * 4);
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(features.size()));
  put_u32(out, static_cast<std::uint32_t>(features.dims()));
  for (float v : features.values()) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
  }
  return out;
}

FeatureSeries decode_sfv(std::span<const std::uint8_t> bytes, std::vector<FrameRef> frames) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(Errc::parse_error, "feature file does not start with SFV1");
  }
  const std::uint32_t t_count = get_u32(bytes.data() + 4);
  const std::uint32_t dims = get_u32(bytes.data() + 8);
  const std::uint64_t expected = 12 + static_cast<std::uint64_t>(t_count) * dims * 4;
  if (bytes.size() != expected) {
    throw Error(Errc::parse_error, "feature file holds " + std::to_string(bytes.size()) +
                                       " bytes, header implies " + std::to_string(expected));
  }
  if (t_count == 0) throw Error(Errc::empty_series, "feature file has no rows");
  std::vector<float> values(static_cast<std::size_t>(t_count) * dims);
  const std::uint8_t* p = bytes.data() + 12;
  for (std::size_t i = 0; i < values.size(); ++i, p += 4) {
    const std::uint32_t bits = get_u32(p);
    std::memcpy(&values[i], &bits, 4);
  }
  return FeatureSeries(dims, std::move(values), std::move(frames));
}

FeatureSeries read_sfv(const std::filesystem::path& path, std::vector<FrameRef> frames) {
  return decode_sfv(read_file(path), std::move(frames));
}

void write_sfv(const std::filesystem::path& path, const FeatureSeries& features) {
  write_file(path, encode_sfv(features));
}

}  // namespace surgq
