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

#ifndef SCENELAY_GEOMETRY_HPP_
#define SCENELAY_GEOMETRY_HPP_

#include <array>

namespace scenelay {

// Box in image-relative coordinates: center plus half extents. y grows
// downward, so a smaller cy is higher in the image.
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double hw = 0.0;
  double hh = 0.0;

  std::array<double, 4> as_array() const { return {cx, cy, hw, hh}; }
  static BBox from_array(const std::array<double, 4>& a) {
    return {a[0], a[1], a[2], a[3]};
  }
  bool operator==(const BBox&) const = default;
};

// Raw annotation box in pixels.
struct PixelBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  bool well_ordered() const { return xmin <= xmax && ymin <= ymax; }
  bool operator==(const PixelBox&) const = default;
};

BBox normalize_box(const PixelBox& p, double image_w, double image_h);
PixelBox denormalize_box(const BBox& b, double image_w, double image_h);

struct MirroredPair {
  BBox subject;
  BBox object;
  bool mirrored = false;
};

// Reflects both boxes about the vertical axis (cx -> 1 - cx) when the object
// center lies strictly left of the subject center.
MirroredPair mirror_pair(const BBox& subject, const BBox& object);

BBox reflect_x(const BBox& b);

// Intersection over union. Negative half extents count as zero.
double iou(const BBox& a, const BBox& b);

}  // namespace scenelay

#endif  // SCENELAY_GEOMETRY_HPP_
