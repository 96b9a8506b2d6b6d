#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.
#

"""gausstomo: learning Gaussian unitaries from oracle queries
"""
from __future__ import absolute_import
from .base import *
from .symplectic import *
from .phaseSpace import *
from .measurement import *
from .bounds import *
from .tomography import *
# experiment plumbing
from .harness import *
from .suites import *
