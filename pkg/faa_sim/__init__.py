# -*- coding: utf-8 -*-

from .base import (C, NOTSET, Notset, ChannelAxis, FrequencyPlan, ChirpConfig, Target, NoiseConfig, Scene,
                   Measurement, FaaError, ConfigError, GeometryError, BandError, AliasingError,
                   DegenerateMeasurementError, DimensionError)
from .dispersion import DispersionModel, LinearSine, LookupTable
from .synth import AntennaModel
from .fingerprint import Fingerprint, PositionGrid, Dictionary
from .sensor import FaaSensor
