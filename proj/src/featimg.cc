// SPDX-License-Identifier: MIT

#include "featimg.h"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "errors.h"

namespace hf {

namespace {

// round_half_up(a / b) on non-negative integers.
inline uint64_t div_half_up(uint64_t a, uint64_t b) {
  return (2 * a + b) / (2 * b);
}

void put_u16le(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v & 0xff));
  out.push_back(uint8_t((v >> 8) & 0xff));
}

// Nearest-neighbour 4x expansion of a compact (w/4 x h/4) plane.
std::vector<uint8_t> expand_plane(const uint8_t* src, int w, int h) {
  const int cw = w / 4;
  std::vector<uint8_t> full(size_t(w) * h);
  for (int y = 0; y < h; y++)
    for (int x = 0; x < w; x++)
      full[size_t(y) * w + x] = src[size_t(y / 4) * cw + (x / 4)];
  return full;
}

}  // namespace

int map_ipm(int ipm) {
  if (ipm < 0 || ipm > 34) throw FormatError("intra mode out of range");
  return int(div_half_up(uint64_t(ipm) * 255, 34));
}

int map_pus(int size) {
  switch (size) {
    case 4: return 0;
    case 8: return 85;
    case 16: return 170;
    case 32: return 255;
    default: throw FormatError("PU size out of range");
  }
}

std::vector<uint8_t> map_bn(const std::vector<PuRecord>& records) {
  if (records.empty()) throw EmptyRecordList();
  uint64_t lo = records[0].bins, hi = records[0].bins;
  for (const PuRecord& r : records) {
    lo = std::min(lo, r.bins);
    hi = std::max(hi, r.bins);
  }
  std::vector<uint8_t> out(records.size());
  if (hi == lo) return out;  // degenerate range: all zero by convention
  const uint64_t range = hi - lo;
  for (size_t i = 0; i < records.size(); i++)
    out[i] = uint8_t(div_half_up((records[i].bins - lo) * 255, range));
  return out;
}

FeatureImage assemble(const std::vector<PuRecord>& records, int width,
                      int height, int qp) {
  if (width <= 0 || height <= 0)
    throw FormatError("feature image dimensions must be positive");
  const std::vector<uint8_t> bn = map_bn(records);

  FeatureImage img;
  img.width = width;
  img.height = height;
  img.qp = qp;
  img.ipm_plane.assign(size_t(width) * height, 0);
  img.pus_plane.assign(size_t(width) * height, 0);
  img.bn_plane.assign(size_t(width) * height, 0);

  std::vector<uint8_t> covered(size_t(width) * height, 0);
  for (size_t i = 0; i < records.size(); i++) {
    const PuRecord& r = records[i];
    if (r.x < 0 || r.y < 0 || r.x + r.size > width || r.y + r.size > height)
      throw TilingGap("PU rectangle outside the picture");
    const uint8_t vi = uint8_t(map_ipm(r.ipm));
    const uint8_t vp = uint8_t(map_pus(r.size));
    const uint8_t vb = bn[i];
    for (int y = r.y; y < r.y + r.size; y++) {
      const size_t row = size_t(y) * width;
      for (int x = r.x; x < r.x + r.size; x++) {
        if (covered[row + x]) throw TilingGap("overlapping PU rectangles");
        covered[row + x] = 1;
        img.ipm_plane[row + x] = vi;
        img.pus_plane[row + x] = vp;
        img.bn_plane[row + x] = vb;
      }
    }
  }
  for (uint8_t c : covered)
    if (!c) throw TilingGap("PU records do not cover the picture");
  return img;
}

std::vector<uint8_t> encode_fimg(const FeatureImage& img, bool compact) {
  if (img.width <= 0 || img.width > 0xffff || img.height <= 0 ||
      img.height > 0xffff)
    throw FormatError("FIMG dimensions out of range");
  if (compact && (img.width % 4 != 0 || img.height % 4 != 0))
    throw FormatError("compact FIMG requires dimensions divisible by 4");
  const size_t n = size_t(img.width) * img.height;
  if (img.ipm_plane.size() != n || img.pus_plane.size() != n ||
      img.bn_plane.size() != n)
    throw FormatError("FIMG plane size mismatch");

  std::vector<uint8_t> out;
  out.reserve(10 + (compact ? 3 * n / 16 : 3 * n));
  out.insert(out.end(), {'F', 'I', 'M', 'G'});
  out.push_back(1);  // version
  put_u16le(out, uint32_t(img.width));
  put_u16le(out, uint32_t(img.height));
  out.push_back(uint8_t(img.qp));
  out.push_back(compact ? 1 : 0);
  for (const auto* plane : {&img.ipm_plane, &img.pus_plane, &img.bn_plane}) {
    if (!compact) {
      out.insert(out.end(), plane->begin(), plane->end());
    } else {
      // One sample per 4x4 cell; planes are constant within cells because
      // every PU is at least 4x4 and 4-aligned.
      for (int y = 0; y < img.height; y += 4)
        for (int x = 0; x < img.width; x += 4)
          out.push_back((*plane)[size_t(y) * img.width + x]);
    }
  }
  return out;
}

FeatureImage decode_fimg(const uint8_t* data, size_t size) {
  if (size < 11 || data[0] != 'F' || data[1] != 'I' || data[2] != 'M' ||
      data[3] != 'G')
    throw FormatError("not a FIMG file");
  if (data[4] != 1) throw FormatError("unsupported FIMG version");
  FeatureImage img;
  img.width = data[5] | (data[6] << 8);
  img.height = data[7] | (data[8] << 8);
  img.qp = data[9];
  const uint8_t flags = data[10];
  if (flags & ~uint8_t{1}) throw FormatError("unknown FIMG flags");
  const bool compact = (flags & 1) != 0;
  if (img.width == 0 || img.height == 0)
    throw FormatError("FIMG dimensions out of range");
  if (compact && (img.width % 4 != 0 || img.height % 4 != 0))
    throw FormatError("compact FIMG requires dimensions divisible by 4");
  const size_t n = size_t(img.width) * img.height;
  const size_t stored = compact ? n / 16 : n;
  if (size != 11 + 3 * stored) throw FormatError("FIMG payload size mismatch");

  const uint8_t* p = data + 11;
  auto load_plane = [&](std::vector<uint8_t>& plane) {
    if (compact)
      plane = expand_plane(p, img.width, img.height);
    else
      plane.assign(p, p + stored);
    p += stored;
  };
  load_plane(img.ipm_plane);
  load_plane(img.pus_plane);
  load_plane(img.bn_plane);
  return img;
}

FeatureImage decode_fimg(const std::vector<uint8_t>& bytes) {
  return decode_fimg(bytes.data(), bytes.size());
}

void save_fimg(const FeatureImage& img, const std::string& path,
               bool compact) {
  write_file(path, encode_fimg(img, compact));
}

FeatureImage load_fimg(const std::string& path) {
  return decode_fimg(read_file(path));
}

void save_ppm(const FeatureImage& img, const std::string& path) {
  const size_t n = size_t(img.width) * img.height;
  std::string header = "P6\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + 3 * n);
  for (size_t i = 0; i < n; i++) {
    out.push_back(img.ipm_plane[i]);
    out.push_back(img.pus_plane[i]);
    out.push_back(img.bn_plane[i]);
  }
  write_file(path, out);
}

std::vector<uint8_t> read_file(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw Error("cannot open " + path);
  std::fseek(f, 0, SEEK_END);
  const long len = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  std::vector<uint8_t> bytes(len > 0 ? size_t(len) : 0);
  const size_t got = bytes.empty() ? 0 : std::fread(bytes.data(), 1, bytes.size(), f);
  std::fclose(f);
  if (got != bytes.size()) throw Error("short read on " + path);
  return bytes;
}

void write_file(const std::string& path, const uint8_t* data, size_t size) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("cannot create " + path);
  const size_t put = size ? std::fwrite(data, 1, size, f) : 0;
  const int rc = std::fclose(f);
  if (put != size || rc != 0) throw Error("short write on " + path);
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  write_file(path, bytes.data(), bytes.size());
}

}  // namespace hf
