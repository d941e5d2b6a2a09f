/* Copyright 2026 The SceneLay Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "scenelay/geometry.hpp"

#include <algorithm>

#include "scenelay/error.hpp"

namespace scenelay {

BBox normalize_box(const PixelBox& p, double image_w, double image_h) {
  if (!(image_w > 0.0) || !(image_h > 0.0)) {
    throw Error("image dimensions must be positive");
  }
  return {(p.xmin + p.xmax) / (2.0 * image_w),
          (p.ymin + p.ymax) / (2.0 * image_h),
          (p.xmax - p.xmin) / (2.0 * image_w),
          (p.ymax - p.ymin) / (2.0 * image_h)};
}

PixelBox denormalize_box(const BBox& b, double image_w, double image_h) {
  return {(b.cx - b.hw) * image_w, (b.cy - b.hh) * image_h,
          (b.cx + b.hw) * image_w, (b.cy + b.hh) * image_h};
}

BBox reflect_x(const BBox& b) { return {1.0 - b.cx, b.cy, b.hw, b.hh}; }

MirroredPair mirror_pair(const BBox& subject, const BBox& object) {
  if (object.cx < subject.cx) {
    return {reflect_x(subject), reflect_x(object), true};
  }
  return {subject, object, false};
}

double iou(const BBox& a, const BBox& b) {
  const double ahw = std::max(a.hw, 0.0), ahh = std::max(a.hh, 0.0);
  const double bhw = std::max(b.hw, 0.0), bhh = std::max(b.hh, 0.0);
  const double ax0 = a.cx - ahw, ax1 = a.cx + ahw, ay0 = a.cy - ahh, ay1 = a.cy + ahh;
  const double bx0 = b.cx - bhw, bx1 = b.cx + bhw, by0 = b.cy - bhh, by1 = b.cy + bhh;
  const double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
  const double ih = std::min(ay1, by1) - std::max(ay0, by0);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double area_a = (ax1 - ax0) * (ay1 - ay0);
  const double area_b = (bx1 - bx0) * (by1 - by0);
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace scenelay
