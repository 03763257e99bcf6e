from . import autograd
from .autograd import Tensor, l1_loss, l2_loss
from .checkpoint import config_fingerprint, load_checkpoint, save_checkpoint
from .model import (HeartRateModel, ModelSpec, NonFiniteActivation,
                    desk_model_spec, paper_model_spec)
from .optim import AdamW, LrSchedule
