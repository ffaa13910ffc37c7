#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "camcond/camera.h"
#include "camcond/geometry.h"
#include "camcond/scalar.h"

namespace camcond {

enum class ParamFamily {
  kSE3,
  kSE3Focal,
  kSE3FocalPP,
  kSE3FocalIntrinsics,
  kFocalPose,
  kFocalPoseIntrinsics,
  kSCNeRF,
};

struct ParamKind {
  ParamFamily family = ParamFamily::kSE3;
  // Pixel-valued residual entries are multiplied by the base focal length.
  bool pixel_scale = false;
  // Length-like additive residuals become multiplicative log residuals.
  bool log_scale = false;

  bool operator==(const ParamKind&) const = default;
};

// Residual dimension k.
int Dim(ParamKind kind);

// Canonical names: "se3", "se3_focal", ..., optionally suffixed "+pix", "+log".
std::string ToString(ParamKind kind);
std::string FamilyName(ParamFamily family);
std::string FlagsString(ParamKind kind);
ParamKind ParseParamKind(std::string_view name);

const std::vector<ParamFamily>& AllFamilies();

// Human-readable name of every residual entry, in layout order:
// pose block, focal, principal point, distortion.
std::vector<std::string> LayoutNames(ParamKind kind);

using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;
// d(flattened camera fields) / d(residual), 18 x k.
using CameraFieldJacobian = Eigen::Matrix<double, kNumCameraFields, Eigen::Dynamic>;

// A map from a residual vector to a realized camera.
class CameraMap {
 public:
  virtual ~CameraMap() = default;

  virtual int dim() const = 0;
  virtual PinholeCamera Apply(const VectorXd& residual) const = 0;
  // Realizes the camera and returns the derivative of its flattened fields.
  virtual CameraFieldJacobian FieldJacobian(const VectorXd& residual,
                                            PinholeCamera* realized = nullptr) const = 0;
};

// Residual parameterization of one family around a fixed base camera.
//
// Lie-group rotation updates are anchored at the base: the realized rotation
// is base + (exp(c0 + d) - exp(c0)) where c0 are the base coordinates. This
// equals exp(c0 + d) up to the round-off of exp(log(base)), and makes a zero
// residual reproduce the base camera bit for bit.
class Parameterization : public CameraMap {
 public:
  Parameterization(ParamKind kind, const PinholeCamera& base);

  ParamKind kind() const { return kind_; }
  const PinholeCamera& base() const { return base_; }
  int dim() const override { return dim_; }

  template <typename T>
  CameraT<T> ApplyT(const T* residual) const;

  PinholeCamera Apply(const VectorXd& residual) const override;
  CameraFieldJacobian FieldJacobian(const VectorXd& residual,
                                    PinholeCamera* realized = nullptr) const override;

 private:
  void CheckLayout(const VectorXd& residual) const;

  ParamKind kind_;
  PinholeCamera base_;
  int dim_;

  // SE3 families.
  ScrewAxis screw0_;
  RigidTransform se3_anchor_;
  // FocalPose families.
  Vec3 omega0_ = Vec3::Zero();
  Mat3 so3_anchor_ = Mat3::Identity();
  // SCNeRF.
  Vec6 rot6d0_ = Vec6::Zero();
  Mat3 rot6d_anchor_ = Mat3::Identity();
};

template <typename T>
CameraT<T> Parameterization::ApplyT(const T* d) const {
  using std::exp;
  const ParamFamily fam = kind_.family;
  const bool is_se3 = fam == ParamFamily::kSE3 || fam == ParamFamily::kSE3Focal ||
                      fam == ParamFamily::kSE3FocalPP || fam == ParamFamily::kSE3FocalIntrinsics;
  const bool is_focal_pose =
      fam == ParamFamily::kFocalPose || fam == ParamFamily::kFocalPoseIntrinsics;
  const double pix = kind_.pixel_scale ? base_.fx : 1.0;

  CameraT<T> cam;
  cam.width = base_.width;
  cam.height = base_.height;
  cam.fx = T(base_.fx);
  cam.fy = T(base_.fy);
  cam.u0 = T(base_.u0);
  cam.v0 = T(base_.v0);
  cam.k1 = T(base_.k1);
  cam.k2 = T(base_.k2);
  const Mat3T<T> base_rot = base_.pose.rotation.template cast<T>();
  const Vec3T<T> base_t = base_.pose.translation.template cast<T>();

  int i = 0;
  if (is_se3) {
    const Vec3T<T> omega(T(screw0_.omega.x()) + d[0], T(screw0_.omega.y()) + d[1],
                         T(screw0_.omega.z()) + d[2]);
    const Vec3T<T> v(T(screw0_.v.x()) + d[3], T(screw0_.v.y()) + d[4], T(screw0_.v.z()) + d[5]);
    const RigidTransformT<T> e = ExpSE3<T>(omega, v);
    cam.pose.rotation = base_rot + (e.rotation - se3_anchor_.rotation.template cast<T>());
    cam.pose.translation = base_t + (e.translation - se3_anchor_.translation.template cast<T>());
    i = 6;
    if (fam != ParamFamily::kSE3) {
      const T scale = exp(d[i]);
      cam.fx = T(base_.fx) * scale;
      cam.fy = T(base_.fy) * scale;
      ++i;
    }
  } else if (is_focal_pose) {
    const Vec3T<T> omega(T(omega0_.x()) + d[0], T(omega0_.y()) + d[1], T(omega0_.z()) + d[2]);
    cam.pose.rotation = base_rot + (ExpSO3<T>(omega) - so3_anchor_.template cast<T>());
    // x' = (dx / f + x / z) z' with z' = z exp(dz), written so that a zero
    // residual returns x exactly.
    const double f = base_.fx;
    const T depth_scale = exp(d[5]);
    const T z_new = T(base_.pose.translation.z()) * depth_scale;
    cam.pose.translation.x() = (pix * d[3] / f) * z_new + base_.pose.translation.x() * depth_scale;
    cam.pose.translation.y() = (pix * d[4] / f) * z_new + base_.pose.translation.y() * depth_scale;
    cam.pose.translation.z() = z_new;
    const T focal_scale = exp(d[6]);
    cam.fx = T(base_.fx) * focal_scale;
    cam.fy = T(base_.fy) * focal_scale;
    i = 7;
  } else {
    Eigen::Matrix<T, 6, 1> a;
    for (int j = 0; j < 6; ++j) a(j) = T(rot6d0_(j)) + d[j];
    cam.pose.rotation = base_rot + (Rot6dToRotation<T>(a) - rot6d_anchor_.template cast<T>());
    cam.pose.translation.x() = base_t.x() + d[6];
    cam.pose.translation.y() = base_t.y() + d[7];
    if (kind_.log_scale) {
      cam.pose.translation.z() = base_t.z() * exp(d[8]);
    } else {
      cam.pose.translation.z() = base_t.z() + d[8];
    }
    if (kind_.log_scale) {
      cam.fx = T(base_.fx) * exp(d[9]);
      cam.fy = T(base_.fy) * exp(d[10]);
    } else {
      cam.fx = T(base_.fx) + pix * d[9];
      cam.fy = T(base_.fy) + pix * d[10];
    }
    i = 11;
  }

  const bool has_pp = fam == ParamFamily::kSE3FocalPP || fam == ParamFamily::kSE3FocalIntrinsics ||
                      fam == ParamFamily::kFocalPoseIntrinsics || fam == ParamFamily::kSCNeRF;
  const bool has_distortion = fam == ParamFamily::kSE3FocalIntrinsics ||
                              fam == ParamFamily::kFocalPoseIntrinsics ||
                              fam == ParamFamily::kSCNeRF;
  if (has_pp) {
    cam.u0 = T(base_.u0) + pix * d[i];
    cam.v0 = T(base_.v0) + pix * d[i + 1];
    i += 2;
  }
  if (has_distortion) {
    cam.k1 = T(base_.k1) + d[i];
    cam.k2 = T(base_.k2) + d[i + 1];
  }
  return cam;
}

}  // namespace camcond
