#pragma once

#include "motseg/assignment.hpp"
#include "motseg/config.hpp"
#include "motseg/config_io.hpp"
#include "motseg/embedding.hpp"
#include "motseg/error.hpp"
#include "motseg/eval.hpp"
#include "motseg/huber.hpp"
#include "motseg/io.hpp"
#include "motseg/mask.hpp"
#include "motseg/pipeline.hpp"
#include "motseg/postfilter.hpp"
#include "motseg/reid.hpp"
#include "motseg/synth.hpp"
#include "motseg/tracker.hpp"
#include "motseg/tracklet.hpp"
