#include "ictal/clip.hpp"

#include <fstream>

#include "binary_io.hpp"

namespace ictal {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::interictal: return "interictal";
    case Label::preictal: return "preictal";
    case Label::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::test: return "test";
    case Split::validation: return "validation";
  }
  return "train";
}

Label parse_label(std::string_view text) {
  if (text == "interictal") return Label::interictal;
  if (text == "preictal") return Label::preictal;
  if (text == "unknown") return Label::unknown;
  throw Error(ErrorCode::invalid_argument, "unknown label '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "test") return Split::test;
  if (text == "validation") return Split::validation;
  throw Error(ErrorCode::invalid_argument, "unknown split '" + std::string(text) + "'");
}

namespace {
constexpr char kMagic[4] = {'I', 'C', 'L', 'P'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

void save_clip(const Clip& clip, const std::filesystem::path& path) {
  if (clip.samples.rank() != 2) {
    throw Error(ErrorCode::shape_mismatch, "clip samples must be (channels, n)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  detail::write_le<std::uint16_t>(out, kVersion);
  detail::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(clip.channels()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(clip.length()));
  detail::write_le<float>(out, clip.sample_rate_hz);
  detail::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(clip.label));
  detail::write_le<std::uint8_t>(out, 0);
  out.write(reinterpret_cast<const char*>(clip.samples.data()),
            static_cast<std::streamsize>(clip.samples.size() * sizeof(float)));
  if (!out) throw Error(ErrorCode::io_error, "failed writing clip " + path.string());
}

Clip load_clip(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open clip " + path.string());
  const std::string where = "clip " + path.string();

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::bad_magic, where + ": bad magic");
  }
  using detail::read_le_or_throw;
  const auto short_header = where + ": truncated header";
  const auto version = read_le_or_throw<std::uint16_t>(in, ErrorCode::truncated_payload, short_header);
  if (version != kVersion) {
    throw Error(ErrorCode::unsupported_version,
                where + ": unsupported version " + std::to_string(version));
  }
  const auto channels = read_le_or_throw<std::uint16_t>(in, ErrorCode::truncated_payload, short_header);
  const auto samples = read_le_or_throw<std::uint32_t>(in, ErrorCode::truncated_payload, short_header);
  const auto rate = read_le_or_throw<float>(in, ErrorCode::truncated_payload, short_header);
  const auto label = read_le_or_throw<std::uint8_t>(in, ErrorCode::truncated_payload, short_header);
  read_le_or_throw<std::uint8_t>(in, ErrorCode::truncated_payload, short_header);

  if (channels == 0 || samples == 0) {
    throw Error(ErrorCode::corrupt_artifact, where + ": zero channels or samples");
  }
  if (label != 0 && label != 1 && label != 255) {
    throw Error(ErrorCode::corrupt_artifact, where + ": unknown label byte " + std::to_string(label));
  }

  Clip clip;
  clip.label = static_cast<Label>(label);
  clip.sample_rate_hz = rate;
  std::vector<float> values(static_cast<std::size_t>(channels) * samples);
  const auto bytes = static_cast<std::streamsize>(values.size() * sizeof(float));
  in.read(reinterpret_cast<char*>(values.data()), bytes);
  if (in.gcount() != bytes) {
    throw Error(ErrorCode::truncated_payload,
                where + ": header claims " + std::to_string(samples) + " samples x " +
                    std::to_string(channels) + " channels but the payload is shorter");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::corrupt_artifact, where + ": trailing bytes after payload");
  }
  clip.samples = Tensor<float>(Shape{channels, samples}, std::move(values));
  return clip;
}

}  // namespace ictal
