from ..utils import config
from ..utils import errors
from ..utils import checks
