__version__ = "0.1.0"

from fusionqa.exceptions import *
from fusionqa.raster_core import *
from fusionqa.raster_io import *
from fusionqa.edge_map import *
from fusionqa.contrast_metrics import *
from fusionqa.snr_metrics import *
from fusionqa.histogram import *
from fusionqa.regions import *
from fusionqa.synth_fusion import *
from fusionqa.report import *
from fusionqa.evaluation import *
