#pragma once

#include "bellnet/qmath.hpp"
#include "bellnet/network.hpp"
#include "bellnet/ansatz.hpp"
#include "bellnet/channels.hpp"
#include "bellnet/behavior.hpp"
#include "bellnet/bell.hpp"
#include "bellnet/oracle.hpp"
#include "bellnet/optimize.hpp"
