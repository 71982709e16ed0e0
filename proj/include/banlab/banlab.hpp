#pragma once

#include <banlab/configuration.hpp>
#include <banlab/delay.hpp>
#include <banlab/error.hpp>
#include <banlab/expr.hpp>
#include <banlab/infer.hpp>
#include <banlab/io.hpp>
#include <banlab/network.hpp>
#include <banlab/schedule.hpp>
#include <banlab/stochastic.hpp>
#include <banlab/tgraph.hpp>
