/*
 * Copyright 2026 The dkm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <limits>

#include "dkm/detail/binary_io.hpp"
#include "dkm/geometry.hpp"

namespace dkm {

void save_warp_file(const WarpField& w, const std::string& path) {
  if (w.shape.height > std::numeric_limits<std::uint32_t>::max() ||
      w.shape.width > std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("warp too large for DKWF");
  detail::ByteWriter out;
  out.bytes("DKWF", 4);
  out.u32(kWarpFileVersion);
  out.u32(static_cast<std::uint32_t>(w.shape.height));
  out.u32(static_cast<std::uint32_t>(w.shape.width));
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.f32(static_cast<float>(w.flow[i].x()));
    out.f32(static_cast<float>(w.flow[i].y()));
    out.f32(static_cast<float>(w.confidence[i]));
  }
  out.write_file(path);
}

WarpField load_warp_file(const std::string& path) {
  auto in = detail::ByteReader::from_file(path);
  const std::string magic = in.magic(4);
  if (magic != "DKWF") throw FormatError("'" + path + "': bad magic, expected DKWF", 0);
  const std::size_t version_at = in.offset();
  const std::uint32_t version = in.u32();
  if (version != kWarpFileVersion)
    throw FormatError("'" + path + "': unsupported DKWF version " + std::to_string(version),
                      version_at);
  const std::uint64_t h = in.u32();
  const std::uint64_t w = in.u32();
  const std::uint64_t expected = h * w * 3 * 4;
  if (expected != in.remaining())
    throw FormatError("'" + path + "': payload size mismatch, header implies " +
                          std::to_string(expected) + " bytes, file has " +
                          std::to_string(in.remaining()),
                      in.offset());
  WarpField out(GridShape{static_cast<std::size_t>(h), static_cast<std::size_t>(w)});
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = in.f32();
    const double y = in.f32();
    out.flow[i] = {x, y};
    out.confidence[i] = in.f32();
  }
  return out;
}

}  // namespace dkm
