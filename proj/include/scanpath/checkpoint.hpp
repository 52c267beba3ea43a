#pragma once

#include <filesystem>

#include "scanpath/model.hpp"
#include "scanpath/schedule.hpp"

namespace scanpath {

struct Checkpoint {
  ModelParams params;
  ScheduleKind schedule = ScheduleKind::Sqrt;
  int t_max = 2000;
  double schedule_offset = NoiseSchedule::kDefaultSqrtOffset;
  long step = 0;
};

/// One JSON header line (config plus a tensor table of names, shapes and
/// dtypes) followed by each tensor as little-endian float32, row-major, in
/// header order. The frozen token table is stored last, flagged as frozen.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace scanpath
