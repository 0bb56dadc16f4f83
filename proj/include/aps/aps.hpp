#pragma once

#include <aps/analytics.hpp>
#include <aps/argument_graph.hpp>
#include <aps/belief_dynamics.hpp>
#include <aps/belief_model.hpp>
#include <aps/concerns.hpp>
#include <aps/dialogue.hpp>
#include <aps/error.hpp>
#include <aps/reward.hpp>
#include <aps/simulation.hpp>
#include <aps/strategy.hpp>
