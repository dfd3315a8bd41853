#pragma once

#include "rumor/community.hpp"
#include "rumor/config.hpp"
#include "rumor/countermeasures.hpp"
#include "rumor/dynamics.hpp"
#include "rumor/errors.hpp"
#include "rumor/experiments.hpp"
#include "rumor/generators.hpp"
#include "rumor/graph.hpp"
#include "rumor/io.hpp"
#include "rumor/rng.hpp"
#include "rumor/spectral.hpp"
