#include <cstring>

#include "surgq/image_io.hpp"
#include "surgq/search.hpp"

namespace surgq {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'I', '1'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  using U = std::make_unsigned_t<T>;
  const auto u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(Errc::parse_error, "index file truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_index(const FrameIndex& index) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.grid().width));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.grid().height));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.size()));
  for (const auto& e : index.entries()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.frame.video_id.size()));
    out.insert(out.end(), e.frame.video_id.begin(), e.frame.video_id.end());
    put_le<std::int64_t>(out, e.frame.frame_index);
    put_le<std::int64_t>(out, e.frame.timestamp_ms);
    out.insert(out.end(), e.cells.begin(), e.cells.end());
  }
  return out;
}

FrameIndex decode_index(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw Error(Errc::parse_error, "not an SFI1 index file");
  GridSize grid;
  grid.width = static_cast<int>(r.le<std::uint32_t>());
  grid.height = static_cast<int>(r.le<std::uint32_t>());
  const auto count = r.le<std::uint32_t>();
  const std::size_t cells = static_cast<std::size_t>(grid.width) * grid.height;
  std::vector<FrameIndex::Entry> entries;
  entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    FrameIndex::Entry e;
    const auto len = r.le<std::uint32_t>();
    const auto id = r.take(len);
    e.frame.video_id.assign(id.begin(), id.end());
    e.frame.frame_index = r.le<std::int64_t>();
    e.frame.timestamp_ms = r.le<std::int64_t>();
    const auto c = r.take(cells);
    for (auto v : c) {
      if (v >= kClassCount) throw Error(Errc::parse_error, "index cell holds class " + std::to_string(v));
    }
    e.cells.assign(c.begin(), c.end());
    entries.push_back(std::move(e));
  }
  if (!r.done()) throw Error(Errc::parse_error, "trailing bytes after index entries");
  return FrameIndex(grid, std::move(entries));
}

FrameIndex read_index(const std::filesystem::path& path) { return decode_index(read_file(path)); }

void write_index(const std::filesystem::path& path, const FrameIndex& index) {
  write_file_atomic(path, encode_index(index));
}

}  // namespace surgq
