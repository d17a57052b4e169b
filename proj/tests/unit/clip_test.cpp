#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "ictal/clip.hpp"
#include "oracles.hpp"

namespace ictal {
namespace {

Clip random_clip(std::uint64_t seed, std::size_t n = 1200) {
  std::mt19937_64 gen(seed);
  Clip c;
  c.label = seed % 2 ? Label::preictal : Label::interictal;
  c.sample_rate_hz = 400.0f;
  c.samples = testing::random_tensor(Shape{16, n}, gen, 30.0).cast<float>();
  return c;
}

ErrorCode load_error(const std::filesystem::path& path) {
  try {
    load_clip(path);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << path;
  return ErrorCode::invalid_argument;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TEST(ClipFile, RoundTripRandomClips) {
  testing::TempDir dir;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto clip = random_clip(seed, 100 + 37 * seed);
    if (seed == 5) clip.label = Label::unknown;
    if (seed == 6) clip.sample_rate_hz = 200.0f;
    const auto path = dir / ("c" + std::to_string(seed) + ".iclp");
    save_clip(clip, path);
    const auto back = load_clip(path);
    EXPECT_EQ(back.label, clip.label);
    EXPECT_EQ(back.sample_rate_hz, clip.sample_rate_hz);
    EXPECT_EQ(back.samples, clip.samples);
  }
}

TEST(ClipFile, HeaderLayout) {
  testing::TempDir dir;
  const auto clip = random_clip(1, 10);
  save_clip(clip, dir / "c.iclp");
  const auto bytes = testing::read_file(dir / "c.iclp");
  ASSERT_EQ(bytes.size(), 18u + 16u * 10u * 4u);
  EXPECT_EQ(bytes.substr(0, 4), "ICLP");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);  // version, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 16);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 10);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 1);  // preictal
}

TEST(ClipFile, DistinctErrorCodes) {
  testing::TempDir dir;
  save_clip(random_clip(3, 50), dir / "good.iclp");
  const auto good = testing::read_file(dir / "good.iclp");

  auto magic = good;
  magic[0] = 'X';
  write_bytes(dir / "magic.iclp", magic);
  EXPECT_EQ(load_error(dir / "magic.iclp"), ErrorCode::bad_magic);

  auto version = good;
  version[4] = 2;
  write_bytes(dir / "version.iclp", version);
  EXPECT_EQ(load_error(dir / "version.iclp"), ErrorCode::unsupported_version);

  write_bytes(dir / "short.iclp", good.substr(0, good.size() - 4));
  EXPECT_EQ(load_error(dir / "short.iclp"), ErrorCode::truncated_payload);

  write_bytes(dir / "header.iclp", good.substr(0, 9));
  EXPECT_EQ(load_error(dir / "header.iclp"), ErrorCode::truncated_payload);

  write_bytes(dir / "long.iclp", good + "xxxx");
  EXPECT_EQ(load_error(dir / "long.iclp"), ErrorCode::corrupt_artifact);

  auto label = good;
  label[16] = 7;
  write_bytes(dir / "label.iclp", label);
  EXPECT_EQ(load_error(dir / "label.iclp"), ErrorCode::corrupt_artifact);

  EXPECT_EQ(load_error(dir / "absent.iclp"), ErrorCode::io_error);
}

TEST(ClipFile, HeaderClaimingFullClipWithShortPayload) {
  testing::TempDir dir;
  save_clip(random_clip(4, 64), dir / "c.iclp");
  auto bytes = testing::read_file(dir / "c.iclp");
  // claim 240000 samples
  const std::uint32_t n = 240000;
  for (int b = 0; b < 4; ++b) bytes[8 + b] = static_cast<char>((n >> (8 * b)) & 0xff);
  write_bytes(dir / "c.iclp", bytes);
  EXPECT_EQ(load_error(dir / "c.iclp"), ErrorCode::truncated_payload);
}

TEST(ClipNames, ParseAndPrint) {
  for (auto l : {Label::interictal, Label::preictal, Label::unknown}) {
    EXPECT_EQ(parse_label(to_string(l)), l);
  }
  for (auto s : {Split::train, Split::test, Split::validation}) {
    EXPECT_EQ(parse_split(to_string(s)), s);
  }
  EXPECT_THROW(parse_label("ictal"), Error);
  EXPECT_THROW(parse_split("dev"), Error);
}

}  // namespace
}  // namespace ictal
