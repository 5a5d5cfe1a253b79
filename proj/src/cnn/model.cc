// SPDX-License-Identifier: MIT
// HFCN model file: magic "HFCN", version 1, u8 input-size code (0 = 64,
// 1 = 128), u8 qp, eight u32-LE blob lengths, then the blobs as f32-LE in
// declaration order (conv1 w/b, conv2 w/b, fc1 w/b, fc2 w/b).

#include "model.h"

#include <cstring>

namespace hf {

namespace {

void put_u32le(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v & 0xff));
  out.push_back(uint8_t((v >> 8) & 0xff));
  out.push_back(uint8_t((v >> 16) & 0xff));
  out.push_back(uint8_t((v >> 24) & 0xff));
}

uint32_t get_u32le(const uint8_t* p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}

void put_f32le(std::vector<uint8_t>& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32le(out, bits);
}

float get_f32le(const uint8_t* p) {
  const uint32_t bits = get_u32le(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

std::vector<uint8_t> encode_model(const Cnn<float>& model) {
  const NetConfig& cfg = model.config();
  if (!cfg.standard())
    throw FormatError("only the standard architecture is serializable");

  std::vector<uint8_t> out;
  out.insert(out.end(), {'H', 'F', 'C', 'N'});
  out.push_back(1);  // version
  out.push_back(cfg.input_size == 64 ? 0 : 1);
  out.push_back(uint8_t(cfg.qp));
  model.params().for_each_blob([&out](const std::vector<float>& b) {
    put_u32le(out, uint32_t(b.size()));
  });
  model.params().for_each_blob([&out](const std::vector<float>& b) {
    for (float v : b) put_f32le(out, v);
  });
  return out;
}

Cnn<float> decode_model(const uint8_t* data, size_t size) {
  if (size < 7 || data[0] != 'H' || data[1] != 'F' || data[2] != 'C' ||
      data[3] != 'N')
    throw FormatError("not an HFCN file");
  if (data[4] != 1) throw FormatError("unsupported HFCN version");
  if (data[5] > 1) throw FormatError("unknown HFCN input-size code");

  NetConfig cfg;
  cfg.input_size = data[5] == 0 ? 64 : 128;
  cfg.qp = data[6];
  Cnn<float> model(cfg);

  if (size < 7 + 8 * 4) throw FormatError("HFCN header truncated");
  const uint8_t* p = data + 7;
  size_t total = 0;
  size_t counts[8];
  for (auto& n : counts) {
    n = get_u32le(p);
    p += 4;
    total += n;
  }
  if (size != 7 + 8 * 4 + 4 * total)
    throw FormatError("HFCN payload size mismatch");

  int i = 0;
  bool shape_ok = true;
  model.params().for_each_blob([&](std::vector<float>& b) {
    if (counts[i++] != b.size()) shape_ok = false;
  });
  if (!shape_ok)
    throw FormatError("HFCN blob sizes do not match the architecture");

  model.params().for_each_blob([&p](std::vector<float>& b) {
    for (float& v : b) {
      v = get_f32le(p);
      p += 4;
    }
  });
  return model;
}

Cnn<float> decode_model(const std::vector<uint8_t>& bytes) {
  return decode_model(bytes.data(), bytes.size());
}

void save_model(const Cnn<float>& model, const std::string& path) {
  write_file(path, encode_model(model));
}

Cnn<float> load_model(const std::string& path) {
  return decode_model(read_file(path));
}

}  // namespace hf
