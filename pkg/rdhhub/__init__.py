from rdhhub import image
from rdhhub import predictors
from rdhhub import rules
from rdhhub import codec
from rdhhub import engine
from rdhhub import metrics
from rdhhub import bench
from rdhhub import cli
