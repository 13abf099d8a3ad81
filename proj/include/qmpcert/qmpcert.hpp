#pragma once

#include "tensor_core.hpp"
#include "partitions.hpp"
#include "symmetrizer.hpp"
#include "divergence.hpp"
#include "qmp.hpp"
#include "estimation.hpp"
#include "capacity.hpp"
