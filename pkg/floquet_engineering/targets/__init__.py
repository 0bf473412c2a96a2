from . import graphs, molecules, sat
