#pragma once

#include "wedgecp/blocks.hpp"
#include "wedgecp/contact.hpp"
#include "wedgecp/errors.hpp"
#include "wedgecp/experiments.hpp"
#include "wedgecp/gbt.hpp"
#include "wedgecp/io.hpp"
#include "wedgecp/parallel.hpp"
#include "wedgecp/paths.hpp"
#include "wedgecp/rational.hpp"
#include "wedgecp/regions.hpp"
#include "wedgecp/rng.hpp"
#include "wedgecp/schedule.hpp"
#include "wedgecp/stats.hpp"
#include "wedgecp/timeline.hpp"
