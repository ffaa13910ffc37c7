#include "camcond/parameterization.h"

#include <string>

namespace camcond {

namespace {

struct FamilyInfo {
  ParamFamily family;
  const char* name;
  int dim;
};

constexpr FamilyInfo kFamilies[] = {
    {ParamFamily::kSE3, "se3", 6},
    {ParamFamily::kSE3Focal, "se3_focal", 7},
    {ParamFamily::kSE3FocalPP, "se3_focal_pp", 9},
    {ParamFamily::kSE3FocalIntrinsics, "se3_focal_intrinsics", 11},
    {ParamFamily::kFocalPose, "focal_pose", 7},
    {ParamFamily::kFocalPoseIntrinsics, "focal_pose_intrinsics", 11},
    {ParamFamily::kSCNeRF, "scnerf", 15},
};

const FamilyInfo& Info(ParamFamily family) {
  for (const auto& info : kFamilies) {
    if (info.family == family) return info;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown parameterization family");
}

}  // namespace

int Dim(ParamKind kind) { return Info(kind.family).dim; }

std::string FamilyName(ParamFamily family) { return Info(family).name; }

std::string FlagsString(ParamKind kind) {
  std::string out;
  if (kind.pixel_scale) out += "+pix";
  if (kind.log_scale) out += "+log";
  return out;
}

std::string ToString(ParamKind kind) { return FamilyName(kind.family) + FlagsString(kind); }

ParamKind ParseParamKind(std::string_view name) {
  ParamKind kind;
  std::string_view base = name.substr(0, name.find('+'));
  std::string_view flags = name.substr(base.size());
  bool found = false;
  for (const auto& info : kFamilies) {
    if (base == info.name) {
      kind.family = info.family;
      found = true;
    }
  }
  if (!found) Fail(ErrorCode::kConfig, "unknown parameterization '" + std::string(name) + "'");
  while (!flags.empty()) {
    const size_t next = flags.find('+', 1);
    std::string_view flag = flags.substr(0, next);
    if (flag == "+pix" && !kind.pixel_scale) {
      kind.pixel_scale = true;
    } else if (flag == "+log" && !kind.log_scale) {
      kind.log_scale = true;
    } else {
      Fail(ErrorCode::kConfig, "bad parameterization flag '" + std::string(flag) + "'");
    }
    flags = next == std::string_view::npos ? std::string_view() : flags.substr(next);
  }
  return kind;
}

const std::vector<ParamFamily>& AllFamilies() {
  static const std::vector<ParamFamily> all = [] {
    std::vector<ParamFamily> v;
    for (const auto& info : kFamilies) v.push_back(info.family);
    return v;
  }();
  return all;
}

std::vector<std::string> LayoutNames(ParamKind kind) {
  std::vector<std::string> names;
  switch (kind.family) {
    case ParamFamily::kSE3:
    case ParamFamily::kSE3Focal:
    case ParamFamily::kSE3FocalPP:
    case ParamFamily::kSE3FocalIntrinsics:
      names = {"w_x", "w_y", "w_z", "v_x", "v_y", "v_z"};
      if (kind.family != ParamFamily::kSE3) names.push_back("log_f");
      break;
    case ParamFamily::kFocalPose:
    case ParamFamily::kFocalPoseIntrinsics:
      names = {"w_x", "w_y", "w_z", "x", "y", "log_z", "log_f"};
      break;
    case ParamFamily::kSCNeRF:
      names = {"a_1", "a_2", "a_3", "a_4", "a_5", "a_6", "t_x", "t_y"};
      names.push_back(kind.log_scale ? "log_t_z" : "t_z");
      names.push_back(kind.log_scale ? "log_f_u" : "f_u");
      names.push_back(kind.log_scale ? "log_f_v" : "f_v");
      break;
  }
  const ParamFamily f = kind.family;
  if (f == ParamFamily::kSE3FocalPP || f == ParamFamily::kSE3FocalIntrinsics ||
      f == ParamFamily::kFocalPoseIntrinsics || f == ParamFamily::kSCNeRF) {
    names.push_back("u_0");
    names.push_back("v_0");
  }
  if (f == ParamFamily::kSE3FocalIntrinsics || f == ParamFamily::kFocalPoseIntrinsics ||
      f == ParamFamily::kSCNeRF) {
    names.push_back("k_1");
    names.push_back("k_2");
  }
  return names;
}

Parameterization::Parameterization(ParamKind kind, const PinholeCamera& base)
    : kind_(kind), base_(base), dim_(Dim(kind)) {
  ValidateCamera(base_);
  switch (kind.family) {
    case ParamFamily::kSE3:
    case ParamFamily::kSE3Focal:
    case ParamFamily::kSE3FocalPP:
    case ParamFamily::kSE3FocalIntrinsics:
      screw0_ = LogSE3(base_.pose);
      se3_anchor_ = ExpSE3(screw0_);
      break;
    case ParamFamily::kFocalPose:
    case ParamFamily::kFocalPoseIntrinsics:
      if (!(base_.pose.translation.z() > 0.0)) {
        Fail(ErrorCode::kInvalidArgument, "FocalPose needs a base with positive t_z");
      }
      omega0_ = LogSO3(base_.pose.rotation);
      so3_anchor_ = ExpSO3<double>(omega0_);
      break;
    case ParamFamily::kSCNeRF:
      rot6d0_ = RotationToRot6d(base_.pose.rotation);
      rot6d_anchor_ = Rot6dToRotation<double>(rot6d0_);
      break;
  }
}

void Parameterization::CheckLayout(const VectorXd& residual) const {
  if (residual.size() != dim_) {
    Fail(ErrorCode::kBadLayout, ToString(kind_) + " expects " + std::to_string(dim_) +
                                    " residual entries, got " + std::to_string(residual.size()));
  }
}

PinholeCamera Parameterization::Apply(const VectorXd& residual) const {
  CheckLayout(residual);
  return ApplyT<double>(residual.data());
}

CameraFieldJacobian Parameterization::FieldJacobian(const VectorXd& residual,
                                                    PinholeCamera* realized) const {
  CheckLayout(residual);
  Jet d[kMaxDim];
  for (int r = 0; r < dim_; ++r) d[r] = Jet(residual(r), r);
  const CameraT<Jet> cam = ApplyT<Jet>(d);
  Jet fields[kNumCameraFields];
  FlattenCamera(cam, fields);

  CameraFieldJacobian jac(kNumCameraFields, dim_);
  for (int f = 0; f < kNumCameraFields; ++f) {
    jac.row(f) = fields[f].v.head(dim_).transpose();
  }
  if (realized != nullptr) *realized = ApplyT<double>(residual.data());
  return jac;
}

}  // namespace camcond
