from . import basis, config, drives, floquet, grape, io, numerics, operators, results, targets, util
