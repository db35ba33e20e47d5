#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "qmwp/io.hpp"

using namespace qmwp;
namespace fsys = std::filesystem;

namespace {
fsys::path scratch(const char* name) {
  auto p = fsys::temp_directory_path() / "qmwp_test_io" / name;
  fsys::remove_all(p);
  fsys::create_directories(p);
  return p;
}
}  // namespace

TEST(Timetags, RoundTrip) {
  TimeTagStream s;
  s.channel_id = 1;
  s.times = {0.0, 1.234, 8.0, 123456789.001, 9.99e11};
  const auto buf = io::encode_timetags(s);
  EXPECT_EQ(buf.size(), 8 + 9 * s.times.size());
  EXPECT_EQ(buf.substr(0, 8), "QMWPTT01");
  EXPECT_EQ(static_cast<unsigned char>(buf[8]), 1);
  const auto r = io::decode_timetags(buf);
  EXPECT_EQ(r.channel_id, 1);
  ASSERT_EQ(r.times.size(), s.times.size());
  for (std::size_t i = 0; i < s.times.size(); ++i) EXPECT_NEAR(r.times[i], s.times[i], 5e-4);
}

TEST(Timetags, LittleEndianFemtoseconds) {
  TimeTagStream s;
  s.times = {1.0};
  const auto buf = io::encode_timetags(s);
  // 1 ps = 1000 fs = 0x03e8
  EXPECT_EQ(static_cast<unsigned char>(buf[9]), 0xe8);
  EXPECT_EQ(static_cast<unsigned char>(buf[10]), 0x03);
  for (int i = 11; i < 17; ++i) EXPECT_EQ(buf[static_cast<std::size_t>(i)], 0);
}

TEST(Timetags, RejectsBadInput) {
  EXPECT_THROW(io::decode_timetags("QMWPTT02"), IoError);
  EXPECT_THROW(io::decode_timetags("QMW"), IoError);
  EXPECT_THROW(io::decode_timetags(std::string("QMWPTT01") + "abc"), IoError);
  EXPECT_TRUE(io::decode_timetags("QMWPTT01").empty());
  TimeTagStream s;
  s.times = {-1.0};
  EXPECT_THROW(io::encode_timetags(s), RecordError);
  EXPECT_THROW(io::read_timetags("/nonexistent/x.qtt"), IoError);
}

TEST(Files, AtomicWriteAndReadBack) {
  const auto dir = scratch("atomic");
  io::atomic_write(dir / "a.txt", "hello\n");
  EXPECT_EQ(io::read_file(dir / "a.txt"), "hello\n");
  EXPECT_FALSE(fsys::exists(dir / "a.txt.partial"));
  io::atomic_write(dir / "a.txt", "x");
  EXPECT_EQ(io::read_file(dir / "a.txt"), "x");
  EXPECT_THROW(io::atomic_write(dir / "missing" / "a.txt", "x"), IoError);
  TimeTagStream s;
  s.times = {3.0, 4.0};
  io::write_timetags(dir / "t.qtt", s);
  EXPECT_EQ(io::read_timetags(dir / "t.qtt").times, s.times);
}

TEST(Files, EnsureWritableDir) {
  const auto dir = scratch("mk") / "a" / "b";
  EXPECT_NO_THROW(io::ensure_writable_dir(dir));
  EXPECT_TRUE(fsys::is_directory(dir));
  EXPECT_TRUE(fsys::is_empty(dir));
  EXPECT_THROW(io::ensure_writable_dir("/proc/qmwp_nope"), IoError);
}

TEST(Csv, Format) {
  io::Csv c("a,b,c");
  c.row(1, 2.5, 0.1);
  c.row(-3, 1e-20, 123456789.0);
  EXPECT_EQ(c.str(), "a,b,c\n1,2.5,0.1\n-3,1e-20,123456789\n");
  T3Stream t;
  t.records = {{0, 5}, {12, 12499}};
  EXPECT_EQ(io::t3_csv(t), "nsync,dtime_bin\n0,5\n12,12499\n");
}

TEST(Svg, ContainsScaledPolyline) {
  const std::vector<double> x{0, 1, 2}, y{0, 1, 0};
  const auto s = io::svg_polyline(x, y, "t", "x", "y");
  EXPECT_NE(s.find("<polyline"), std::string::npos);
  EXPECT_NE(s.find("70.000000,350.000000"), std::string::npos);
  EXPECT_NE(s.find("620.000000,350.000000"), std::string::npos);
  EXPECT_NE(s.find("345.000000,40.000000"), std::string::npos);
}

TEST(Hash, Sha256) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
