// SPDX-License-Identifier: MIT
// Error taxonomy shared by the bitstream front-end and the training harness.
//
// Exceptions, not error codes: a parse aborts on the first inconsistency
// because CABAC desynchronization makes everything after it meaningless.
#pragma once

#include <stdexcept>
#include <string>

namespace hf {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- bitstream-level errors (CLI exit code 3) ------------------------------

// No Annex-B start code (0x000001 / 0x00000001) in the input.
struct NoStartCode : Error {
  NoStartCode() : Error("no Annex-B start code found") {}
};

// A NAL unit too short to carry the 2-byte header.
struct TruncatedNal : Error {
  explicit TruncatedNal(const std::string& msg = "truncated NAL unit")
      : Error(msg) {}
};

// A read past the end of the available bits.
struct OutOfBits : Error {
  explicit OutOfBits(const std::string& msg = "read past end of payload")
      : Error(msg) {}
};

// Syntax that no conforming stream can produce.
struct MalformedCode : Error {
  explicit MalformedCode(const std::string& msg) : Error(msg) {}
};

// ---- subset gate (CLI exit code 2) ------------------------------------------

// A conforming HEVC feature outside the supported all-intra subset.  `feature`
// is a stable identifier ("tiles", "bit_depth", ...) for tests and messages.
struct UnsupportedFeature : Error {
  std::string feature;
  explicit UnsupportedFeature(const std::string& name,
                              const std::string& detail = "")
      : Error("unsupported feature: " + name +
              (detail.empty() ? "" : " (" + detail + ")")),
        feature(name) {}
};

// ---- data / model errors (CLI exit code 1) ----------------------------------

// Bad magic/version/length in a FIMG or HFCN file.
struct FormatError : Error {
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Tensor or image dimensions that do not fit the model.
struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

// An operation that needs at least one sample got none.
struct EmptyDataset : Error {
  explicit EmptyDataset(const std::string& msg = "empty dataset") : Error(msg) {}
};

// map_bn / assemble over an empty PU record list.
struct EmptyRecordList : Error {
  EmptyRecordList() : Error("empty PU record list") {}
};

// PU records that do not tile the picture exactly.
struct TilingGap : Error {
  explicit TilingGap(const std::string& msg) : Error(msg) {}
};

}  // namespace hf
