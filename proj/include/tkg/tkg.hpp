#pragma once

#include "tkg/config.hpp"
#include "tkg/detect.hpp"
#include "tkg/error.hpp"
#include "tkg/geometry.hpp"
#include "tkg/graph.hpp"
#include "tkg/interval.hpp"
#include "tkg/profile.hpp"
#include "tkg/program.hpp"
#include "tkg/random.hpp"
#include "tkg/sample.hpp"
#include "tkg/scene.hpp"
#include "tkg/synth.hpp"
#include "tkg/templates.hpp"
#include "tkg/tubelet.hpp"
#include "tkg/validate.hpp"
