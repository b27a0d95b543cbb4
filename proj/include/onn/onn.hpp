#pragma once

#include "onn/types.hpp"
#include "onn/oscillator.hpp"
#include "onn/coupling.hpp"
#include "onn/engine.hpp"
#include "onn/rng.hpp"
#include "onn/training.hpp"
#include "onn/tasks.hpp"
#include "onn/cost_model.hpp"
#include "onn/io.hpp"
