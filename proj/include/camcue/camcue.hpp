#pragma once

#include "camcue/camera.hpp"
#include "camcue/dataset_io.hpp"
#include "camcue/error.hpp"
#include "camcue/frame.hpp"
#include "camcue/parallel.hpp"
#include "camcue/plucker.hpp"
#include "camcue/pose_eval.hpp"
#include "camcue/pose_net.hpp"
#include "camcue/synth_scene.hpp"
#include "camcue/trainer.hpp"
#include "camcue/view_selection.hpp"
