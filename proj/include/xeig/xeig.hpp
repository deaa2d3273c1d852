#pragma once

#include <xeig/dense_operator.hpp>
#include <xeig/exact_linalg.hpp>
#include <xeig/matrix_sigma.hpp>
#include <xeig/scalar.hpp>
#include <xeig/shift_sigma.hpp>
#include <xeig/status.hpp>
#include <xeig/volterra.hpp>
#include <xeig/weights.hpp>
